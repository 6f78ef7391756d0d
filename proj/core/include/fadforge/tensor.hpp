#pragma once

#include <cmath>

namespace fadforge {

/// Symmetric second-order tensor under plane-strain kinematics.
/// The out-of-plane normal component zz is carried explicitly: total strain
/// has zz = 0, but plastic flow and the elastic response do not.
struct SymTensor2 {
  double xx = 0.0;
  double yy = 0.0;
  double zz = 0.0;
  double xy = 0.0;  // tensor component, not engineering shear

  static SymTensor2 identity() { return {1.0, 1.0, 1.0, 0.0}; }

  double trace() const { return xx + yy + zz; }

  SymTensor2 deviator() const {
    const double m = trace() / 3.0;
    return {xx - m, yy - m, zz - m, xy};
  }

  /// Full double contraction a:a (off-diagonal counted twice).
  double norm_sq() const { return xx * xx + yy * yy + zz * zz + 2.0 * xy * xy; }

  double contract(const SymTensor2& o) const {
    return xx * o.xx + yy * o.yy + zz * o.zz + 2.0 * xy * o.xy;
  }

  /// von Mises equivalent of a stress-like tensor.
  double von_mises() const {
    const SymTensor2 s = deviator();
    return std::sqrt(1.5 * s.norm_sq());
  }

  double hydrostatic() const { return trace() / 3.0; }

  SymTensor2& operator+=(const SymTensor2& o) {
    xx += o.xx;
    yy += o.yy;
    zz += o.zz;
    xy += o.xy;
    return *this;
  }
  SymTensor2& operator-=(const SymTensor2& o) {
    xx -= o.xx;
    yy -= o.yy;
    zz -= o.zz;
    xy -= o.xy;
    return *this;
  }
  SymTensor2& operator*=(double c) {
    xx *= c;
    yy *= c;
    zz *= c;
    xy *= c;
    return *this;
  }

  friend SymTensor2 operator+(SymTensor2 a, const SymTensor2& b) { return a += b; }
  friend SymTensor2 operator-(SymTensor2 a, const SymTensor2& b) { return a -= b; }
  friend SymTensor2 operator*(double c, SymTensor2 a) { return a *= c; }
  friend SymTensor2 operator*(SymTensor2 a, double c) { return a *= c; }
};

inline double macaulay(double x) { return x > 0.0 ? x : 0.0; }

}  // namespace fadforge
