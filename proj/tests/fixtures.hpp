#pragma once

#include "pcw/sweeps.hpp"

namespace pcw::test {

// W1 study at resolution 16 shared by all unit tests.
inline const W1Study& small_w1() {
  static W1Study study([] {
    StudySettings s;
    s.layout.resolution = 16;
    s.layout.pml.cells = 16;
    return s;
  }());
  return study;
}

}  // namespace pcw::test
