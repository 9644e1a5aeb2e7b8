#pragma once

#include <string>

#include "multiflow/dynamics.hpp"

namespace multiflow {

// Binary state files, little-endian throughout:
//   magic "MPF1", version u32, dim u32, N u32, n u32,
//   weights n f64, masses n f64,
//   then rho_1..rho_n, then u_1..u_n (x component, then y),
//   each field N^dim f64 row-major (x outermost).
// Field payloads round-trip bit-exactly. Time and phase labels are not
// stored: read_snapshot returns t = 0 and labels 0..n-1.
void write_snapshot(const FlowState& s, const std::string& path);
FlowState read_snapshot(const std::string& path);

}  // namespace multiflow
