#pragma once

#include <hardylab/errors.hpp>
#include <optional>
#include <hardylab/geometry.hpp>

#include <gtest/gtest.h>

namespace hl = hardylab;

inline hl::GeometryConfig geom(int N, int k, double R, int n_r, int n_z, double gamma = 2.0) {
  hl::GeometryConfig g;
  g.N = N;
  g.k = k;
  g.R = R;
  g.n_r = n_r;
  g.n_z = n_z;
  g.grading_gamma = gamma;
  return g;
}

inline hl::FermiPoint pt(double r, std::vector<double> z) {
  hl::FermiPoint p;
  p.r = r;
  p.z = std::move(z);
  return p;
}

// code of the hardylab::Error thrown by f, or nullopt
template <class F>
std::optional<hl::ErrorCode> error_of(F&& f) {
  try {
    f();
  } catch (const hl::Error& e) {
    return e.code();
  }
  return std::nullopt;
}

#define EXPECT_HL_ERROR(expr, code) EXPECT_EQ(error_of([&] { (void)(expr); }), hl::ErrorCode::code)
