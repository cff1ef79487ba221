#pragma once

namespace semitorus {

// Smooth plateau profile: 1 on [0,1], 0 on [2,inf), C-infinity in between.
struct Plateau {
  double value = 0.0;
  double d1 = 0.0;  // d/dr
  double d2 = 0.0;  // d^2/dr^2
};

Plateau plateau(double r);
inline double plateau_value(double r) { return plateau(r).value; }

}  // namespace semitorus
