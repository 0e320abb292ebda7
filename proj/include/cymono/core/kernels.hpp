#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace cymono::core {

// Every kernel below has a plain serial implementation and an OpenMP one.
// Both walk the same fixed chunk grid, so reductions associate identically
// under either policy and under any thread count: results are bit-equal.
enum class ExecPolicy { Serial, Parallel };

inline constexpr std::int64_t kChunkCount = 1024;

struct ChunkGrid {
  std::int64_t n;
  std::int64_t chunks;
  std::int64_t begin(std::int64_t c) const { return c * n / chunks; }
  std::int64_t end(std::int64_t c) const { return (c + 1) * n / chunks; }
};

inline ChunkGrid make_chunks(std::int64_t n) {
  return ChunkGrid{n, n < kChunkCount ? (n > 0 ? n : 1) : kChunkCount};
}

// Elementwise writes; fn(i) must touch only slot i.
template <typename Fn>
void fill_indexed(std::int64_t n, ExecPolicy policy, Fn&& fn) {
  if (n <= 0) return;
#ifdef _OPENMP
  if (policy == ExecPolicy::Parallel) {
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < n; ++i) fn(i);
    return;
  }
#else
  (void)policy;
#endif
  for (std::int64_t i = 0; i < n; ++i) fn(i);
}

struct ArgMin {
  double value;
  std::int64_t index;  // first index attaining value in scan order
};

namespace detail {

template <typename Fn>
ArgMin scan_min_range(std::int64_t lo, std::int64_t hi, Fn& value_at) {
  ArgMin best{value_at(lo), lo};
  for (std::int64_t i = lo + 1; i < hi; ++i) {
    const double v = value_at(i);
    if (v < best.value) best = ArgMin{v, i};
  }
  return best;
}

}  // namespace detail

// Minimum value and the first index attaining it. n must be >= 1.
template <typename Fn>
ArgMin scan_min(std::int64_t n, ExecPolicy policy, Fn&& value_at) {
  const ChunkGrid g = make_chunks(n);
  std::vector<ArgMin> partial(static_cast<std::size_t>(g.chunks));
#ifdef _OPENMP
  if (policy == ExecPolicy::Parallel) {
#pragma omp parallel for schedule(static)
    for (std::int64_t c = 0; c < g.chunks; ++c)
      partial[static_cast<std::size_t>(c)] =
          detail::scan_min_range(g.begin(c), g.end(c), value_at);
  } else
#endif
  {
    for (std::int64_t c = 0; c < g.chunks; ++c)
      partial[static_cast<std::size_t>(c)] =
          detail::scan_min_range(g.begin(c), g.end(c), value_at);
  }
  ArgMin best = partial[0];
  for (std::size_t c = 1; c < partial.size(); ++c)
    if (partial[c].value < best.value) best = partial[c];
  return best;
}

template <typename Fn>
double scan_max_value(std::int64_t n, ExecPolicy policy, Fn&& value_at) {
  auto neg = [&](std::int64_t i) { return -value_at(i); };
  return -scan_min(n, policy, neg).value;
}

// Fixed-chunk deterministic sum: per-chunk left-to-right, then chunks in
// ascending order.
template <typename Fn>
double scan_sum(std::int64_t n, ExecPolicy policy, Fn&& value_at) {
  if (n <= 0) return 0.0;
  const ChunkGrid g = make_chunks(n);
  std::vector<double> partial(static_cast<std::size_t>(g.chunks), 0.0);
#ifdef _OPENMP
  if (policy == ExecPolicy::Parallel) {
#pragma omp parallel for schedule(static)
    for (std::int64_t c = 0; c < g.chunks; ++c) {
      double s = 0.0;
      for (std::int64_t i = g.begin(c); i < g.end(c); ++i) s += value_at(i);
      partial[static_cast<std::size_t>(c)] = s;
    }
  } else
#endif
  {
    for (std::int64_t c = 0; c < g.chunks; ++c) {
      double s = 0.0;
      for (std::int64_t i = g.begin(c); i < g.end(c); ++i) s += value_at(i);
      partial[static_cast<std::size_t>(c)] = s;
    }
  }
  double total = 0.0;
  for (double s : partial) total += s;
  return total;
}

}  // namespace cymono::core
