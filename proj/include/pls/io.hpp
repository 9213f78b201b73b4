#pragma once

#include <Eigen/Dense>
#include <string>

#include "pls/grid.hpp"
#include "pls/operators.hpp"
#include "pls/proxy.hpp"

namespace pls {

// Binary formats (all integers and doubles little-endian):
//   PLS1 signal:   "PLS1", u32 d, d x u32 sides, N x f64 row-major values.
//   PLSA operator: "PLSA", u32 K (total rows), u32 N, u8 has_mean_row,
//                  K*N x f64 row-major entries.
//   PLSV vector:   "PLSV", u32 length, length x f64 values.
// Masks: binary PBM (P4) for d = 2, PLS1 with 0/1 values for d = 1.
// Previews: PGM (P5), 8-bit, min-max scaled.

void write_signal(const std::string& path, const GridSignal& f);
GridSignal read_signal(const std::string& path);

void write_operator(const std::string& path, const MeasurementOperator& A);
MeasurementOperator read_operator(const std::string& path);

void write_vector(const std::string& path, const Eigen::VectorXd& v);
Eigen::VectorXd read_vector(const std::string& path);

void write_mask(const std::string& path, const LevelSetMask& mask);
LevelSetMask read_mask(const std::string& path);

void write_pgm_preview(const std::string& path, const GridSignal& f);

// Preorder text dump of a partition: one line per node with its cell,
// action, and leaf label.
std::string format_tree(const PartitionEstimate& est);
void write_tree_dump(const std::string& path, const PartitionEstimate& est);

// Text sidecar for a proxy: lambda_hat, gamma_effective, mode.
void write_proxy_sidecar(const std::string& path, const ProxyResult& proxy);

void write_text(const std::string& path, const std::string& text);

// %.17g rendering used everywhere a double enters a text file.
std::string format_double(double v);

}  // namespace pls
