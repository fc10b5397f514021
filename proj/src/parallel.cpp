#include "fl/parallel.hpp"

#include <omp.h>

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <limits>

namespace fl::par {

namespace {
std::atomic<int> g_threads{0};  // 0 = OpenMP default, 1 = serial reference

int initial_threads() {
  if (const char* env = std::getenv("FL_THREADS")) {
    int v = std::atoi(env);
    if (v >= 1) return v;
  }
  return 0;
}
}  // namespace

void set_threads(int n) { g_threads.store(n < 0 ? 0 : n); }

int threads() {
  static const int init = initial_threads();
  int v = g_threads.load();
  return v == 0 ? init : v;
}

bool parallel_enabled() { return threads() != 1; }

void serial_for(std::size_t n, const std::function<void(std::size_t)>& body) {
  for (std::size_t i = 0; i < n; ++i) body(i);
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body) {
  if (!parallel_enabled() || n < 2) {
    serial_for(n, body);
    return;
  }
  const int nt = threads();
#pragma omp parallel for schedule(static) num_threads(nt > 0 ? nt : omp_get_max_threads())
  for (long long i = 0; i < static_cast<long long>(n); ++i)
    body(static_cast<std::size_t>(i));
}

double reduce_blocks_serial(std::size_t n, std::size_t block,
                            const std::function<double(std::size_t)>& term) {
  if (block == 0) block = 1;
  double total = 0.0;
  for (std::size_t b0 = 0; b0 < n; b0 += block) {
    const std::size_t b1 = std::min(n, b0 + block);
    double s = 0.0;
    for (std::size_t i = b0; i < b1; ++i) s += term(i);
    total += s;
  }
  return total;
}

double reduce_blocks(std::size_t n, std::size_t block,
                     const std::function<double(std::size_t)>& term) {
  if (!parallel_enabled() || n < 2) return reduce_blocks_serial(n, block, term);
  if (block == 0) block = 1;
  const std::size_t nblocks = (n + block - 1) / block;
  std::vector<double> partial(nblocks, 0.0);
  parallel_for(nblocks, [&](std::size_t b) {
    const std::size_t b0 = b * block;
    const std::size_t b1 = std::min(n, b0 + block);
    double s = 0.0;
    for (std::size_t i = b0; i < b1; ++i) s += term(i);
    partial[b] = s;
  });
  double total = 0.0;
  for (double s : partial) total += s;  // fixed block order
  return total;
}

double reduce_max(std::size_t n, const std::function<double(std::size_t)>& term) {
  constexpr std::size_t kBlock = 1024;
  const std::size_t nblocks = (n + kBlock - 1) / kBlock;
  std::vector<double> partial(nblocks, -std::numeric_limits<double>::infinity());
  parallel_for(nblocks, [&](std::size_t b) {
    const std::size_t b0 = b * kBlock;
    const std::size_t b1 = std::min(n, b0 + kBlock);
    double m = -std::numeric_limits<double>::infinity();
    for (std::size_t i = b0; i < b1; ++i) m = std::max(m, term(i));
    partial[b] = m;
  });
  double m = -std::numeric_limits<double>::infinity();
  for (double v : partial) m = std::max(m, v);
  return m;
}

}  // namespace fl::par
