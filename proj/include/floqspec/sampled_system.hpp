#pragma once

#include <istream>
#include <string>

#include "floqspec/periodic_system.hpp"

namespace floqspec {

/// Text format for externally supplied systems:
///
///   # floqspec sampled system v1
///   # dimension=D noise_count=N period=T
///   # G=re,im,re,im,...            (N x N, row-major)
///   t,L11_re,L11_im,L12_re,...,LDD_im,B11_re,B11_im,...,BDN_im
///   0,...
///
/// Rows sample one period on the uniform grid t_j = j T / M, j = 0..M-1
/// (t = T is excluded). L and B are interpolated by periodic cubic splines.
inline constexpr const char* kSampledSystemMagic = "# floqspec sampled system v1";

PeriodicLinearSystem read_sampled_system(std::istream& in, const std::string& source = "<stream>");
PeriodicLinearSystem load_sampled_system(const std::string& path);

/// Writes `samples` uniform samples of the system in the same format.
void write_sampled_system(std::ostream& out, const PeriodicLinearSystem& system, std::size_t samples);

}  // namespace floqspec
