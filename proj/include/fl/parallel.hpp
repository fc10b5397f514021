#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace fl::par {

/// Global switch between the OpenMP kernels and their serial reference
/// implementations.  Thread count 1 selects the serial path; anything else
/// runs the OpenMP path with that many threads (0 = OpenMP default).
void set_threads(int n);
int threads();

/// True when the OpenMP path is active.
bool parallel_enabled();

/// Runs body(i) for i in [0, n).  Body must be independent across i.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);
void serial_for(std::size_t n, const std::function<void(std::size_t)>& body);

/// Deterministic sum reduction: items are split into fixed-size blocks,
/// each block is summed in index order, and block sums are combined in
/// block order.  The result is bit-identical for any thread count because
/// the floating-point addition order never depends on scheduling.
double reduce_blocks(std::size_t n, std::size_t block,
                     const std::function<double(std::size_t)>& term);
double reduce_blocks_serial(std::size_t n, std::size_t block,
                            const std::function<double(std::size_t)>& term);

/// Deterministic max reduction (order-independent by nature, parallel for
/// symmetry with reduce_blocks).
double reduce_max(std::size_t n, const std::function<double(std::size_t)>& term);

}  // namespace fl::par
