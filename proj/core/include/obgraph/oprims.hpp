#pragma once

// Oblivious building blocks. The external-memory trace of every routine here
// is a function of the public input lengths, the declared output lengths, the
// record width and the OM capacity only.

#include <algorithm>
#include <bit>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <span>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

#include "obgraph/error.hpp"
#include "obgraph/ext_array.hpp"
#include "obgraph/om.hpp"
#include "obgraph/runtime.hpp"

namespace obg {

// Compare-exchanges performed by the OM-assisted bitonic network on a
// power-of-two width `padded` with `om_records` records sorted per OM block.
std::uint64_t bitonic_network_size(std::size_t padded, std::size_t om_records);

// Records per OM block o_sort would use for `length` records of `width`
// bytes given `available` OM bytes; 0 when fewer than two records fit.
std::size_t sort_block_records(std::size_t length, std::size_t width,
                               std::size_t available);

namespace detail {

template <class T>
struct Padded {
  T value;
  std::uint8_t sentinel;  // +inf padding when set
};

// In-place bitonic sort of a power-of-two-length array. Strides of at least
// one OM block run as compare-exchanges in external memory; everything below
// runs inside OM on whole blocks.
template <class U, class Less>
void bitonic_sort_pow2(ExtArray<U>& a, const Less& less, Runtime& rt,
                       std::size_t public_length) {
  const std::size_t padded = a.size();
  const std::size_t block =
      sort_block_records(padded, sizeof(U), rt.om(0).available());
  if (block == 0) {
    throw Error(ErrorCode::kOMUnavailable,
                "OM holds fewer than two records of " +
                    std::to_string(sizeof(U)) + " bytes");
  }
  const std::size_t workers = rt.workers();
  std::vector<std::uint64_t> exchanges(workers, 0);

  // Sorts every OM block; block at `base` ascends iff (base & dir_bit) == 0.
  auto sort_blocks = [&](std::size_t dir_bit) {
    const std::size_t blocks = padded / block;
    rt.parallel([&](std::size_t w) {
      const auto range = static_range(blocks, w, workers);
      if (range.begin == range.end) return;
      OmBuffer<U> buf(rt.om(w), block);
      auto span = buf.span();
      for (std::size_t q = range.begin; q < range.end; ++q) {
        const std::size_t base = q * block;
        for (std::size_t i = 0; i < block; ++i) buf[i] = a.read(base + i);
        if ((base & dir_bit) == 0) {
          std::sort(span.begin(), span.end(), less);
        } else {
          std::sort(span.begin(), span.end(),
                    [&](const U& x, const U& y) { return less(y, x); });
        }
        for (std::size_t i = 0; i < block; ++i) a.write(base + i, buf[i]);
      }
    });
  };

  sort_blocks(block);
  for (std::size_t size = block * 2; size <= padded; size *= 2) {
    for (std::size_t stride = size / 2; stride >= block; stride /= 2) {
      const int shift = std::countr_zero(stride);
      rt.parallel([&](std::size_t w) {
        const auto range = static_range(padded / 2, w, workers);
        std::uint64_t count = 0;
        for (std::size_t q = range.begin; q < range.end; ++q) {
          const std::size_t i = ((q >> shift) << (shift + 1)) | (q & (stride - 1));
          const std::size_t j = i + stride;
          U x = a.read(i);
          U y = a.read(j);
          const bool up = (i & size) == 0;
          if (up ? less(y, x) : less(x, y)) std::swap(x, y);
          a.write(i, x);
          a.write(j, y);
          ++count;
        }
        exchanges[w] += count;
      });
    }
    sort_blocks(size);
  }

  SortRecord rec;
  rec.length = public_length;
  rec.padded = padded;
  rec.om_records = block;
  rec.compare_exchanges =
      std::accumulate(exchanges.begin(), exchanges.end(), std::uint64_t{0});
  rt.stats().record_sort(rec);
}

}  // namespace detail

// Sorts `a` in place by `less`. Non-power-of-two lengths are padded with
// +inf sentinels in a scratch region whose length depends only on a.size().
// Not stable; callers needing determinism under ties pass a total order.
template <class T, class Less>
void o_sort(ExtArray<T>& a, Less less, Runtime& rt) {
  const std::size_t n = a.size();
  if (rt.om(0).available() < 2 * sizeof(T)) {
    throw Error(ErrorCode::kOMUnavailable,
                "OM cannot hold two records of " + std::to_string(sizeof(T)) +
                    " bytes");
  }
  if (n <= 1) return;
  const std::size_t padded = std::bit_ceil(n);
  if (padded == n) {
    detail::bitonic_sort_pow2(a, less, rt, n);
    return;
  }
  using P = detail::Padded<T>;
  ExtArray<P> tmp(a.name() + ".pad", padded);
  for (std::size_t i = 0; i < n; ++i) tmp.write(i, P{a.read(i), 0});
  for (std::size_t i = n; i < padded; ++i) tmp.write(i, P{T{}, 1});
  auto padded_less = [&less](const P& x, const P& y) {
    if (x.sentinel != y.sentinel) return x.sentinel < y.sentinel;
    return x.sentinel == 0 && less(x.value, y.value);
  };
  detail::bitonic_sort_pow2(tmp, padded_less, rt, n);
  for (std::size_t i = 0; i < n; ++i) a.write(i, tmp.read(i).value);
}

// out[i] = fn(in[i]); one read and one write per element, in order. `fn` may
// carry state (kept in registers/OM), e.g. a running maximum.
template <class T, class R, class Fn>
void o_trans_into(ExtView<T> in, ExtSlice<R> out, Fn&& fn) {
  if (in.size() != out.size()) {
    throw Error(ErrorCode::kSizeMismatch, "o_trans output length differs");
  }
  for (std::size_t i = 0; i < in.size(); ++i) out.write(i, fn(in.read(i)));
}

template <class T, class Fn>
auto o_trans(const ExtArray<T>& in, Fn&& fn, std::string out_name) {
  using R = std::remove_cvref_t<std::invoke_result_t<Fn&, const T&>>;
  ExtArray<R> out(std::move(out_name), in.size());
  o_trans_into<T, R>(ExtView<T>(in), ExtSlice<R>(out), fn);
  return out;
}

template <class T>
std::vector<ExtView<T>> views(const std::vector<ExtArray<T>>& arrays) {
  return {arrays.begin(), arrays.end()};
}

// Concatenates fn(inputs[i][j], i) in i-major, j-minor order into `out`.
template <class T, class R, class Fn>
void o_trans_merge_into(std::span<const ExtView<T>> inputs, ExtSlice<R> out,
                        Fn&& fn) {
  std::size_t total = 0;
  for (const auto& in : inputs) total += in.size();
  if (total != out.size()) {
    throw Error(ErrorCode::kSizeMismatch, "o_trans_merge output length differs");
  }
  std::size_t pos = 0;
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    for (std::size_t j = 0; j < inputs[i].size(); ++j) {
      out.write(pos++, fn(inputs[i].read(j), i));
    }
  }
}

template <class T, class Fn>
auto o_trans_merge(std::span<const ExtView<T>> inputs, Fn&& fn,
                   std::string out_name) {
  using R = std::remove_cvref_t<std::invoke_result_t<Fn&, const T&, std::size_t>>;
  std::size_t total = 0;
  for (const auto& in : inputs) total += in.size();
  ExtArray<R> out(std::move(out_name), total);
  o_trans_merge_into<T, R>(inputs, ExtSlice<R>(out), fn);
  return out;
}

template <class T>
ExtArray<T> o_merge(std::span<const ExtView<T>> inputs, std::string out_name) {
  return o_trans_merge(inputs, [](const T& x, std::size_t) { return x; },
                       std::move(out_name));
}

struct NoTieBreak {
  template <class T>
  bool operator()(const T&, const T&) const {
    return false;
  }
};

// Sorts `a` in place by (bucket(x), tie(x)) and deals g(x) into `buckets`
// outputs whose lengths are the public `declared` sizes. Bucket boundaries in
// the append pass sit at the declared prefix sums, so the trace never depends
// on the actual bucket populations; a population that disagrees with its
// declaration raises kSizeMismatch after the pass.
template <class T, class F, class G, class Tie = NoTieBreak>
auto o_split_trans(ExtArray<T>& a, std::size_t buckets, F bucket, G g,
                   std::span<const std::size_t> declared, Runtime& rt,
                   const std::string& out_name, Tie tie = {}) {
  using R = std::remove_cvref_t<std::invoke_result_t<G&, const T&>>;
  if (declared.size() != buckets) {
    throw Error(ErrorCode::kSizeMismatch, "one declared size per bucket required");
  }
  const std::size_t total =
      std::accumulate(declared.begin(), declared.end(), std::size_t{0});
  if (total != a.size()) {
    throw Error(ErrorCode::kSizeMismatch,
                "declared sizes sum to " + std::to_string(total) +
                    ", input has " + std::to_string(a.size()));
  }

  o_sort(
      a,
      [&](const T& x, const T& y) {
        const std::size_t bx = bucket(x);
        const std::size_t by = bucket(y);
        if (bx != by) return bx < by;
        return tie(x, y);
      },
      rt);

  std::vector<ExtArray<R>> out;
  out.reserve(buckets);
  for (std::size_t b = 0; b < buckets; ++b) {
    out.emplace_back(out_name + "." + std::to_string(b), declared[b]);
  }
  bool mismatch = false;
  std::size_t current = 0;
  std::size_t start = 0;
  for (std::size_t j = 0; j < a.size(); ++j) {
    while (j - start >= declared[current]) {
      start += declared[current];
      ++current;
    }
    const T x = a.read(j);
    mismatch |= (bucket(x) != current);
    out[current].write(j - start, g(x));
  }
  if (mismatch) {
    throw Error(ErrorCode::kSizeMismatch,
                "bucket populations differ from declared sizes");
  }
  return out;
}

// Keeps the records satisfying `keep`; the kept count is public.
template <class T, class Pred, class Tie = NoTieBreak>
ExtArray<T> o_filter(ExtArray<T>& a, Pred keep, std::size_t declared_kept,
                     Runtime& rt, const std::string& out_name, Tie tie = {}) {
  if (declared_kept > a.size()) {
    throw Error(ErrorCode::kSizeMismatch, "declared kept count exceeds input");
  }
  const std::size_t sizes[2] = {a.size() - declared_kept, declared_kept};
  auto parts = o_split_trans(
      a, 2, [&](const T& x) -> std::size_t { return keep(x) ? 1 : 0; },
      [](const T& x) { return x; }, std::span<const std::size_t>(sizes), rt,
      out_name, tie);
  return std::move(parts[1]);
}

}  // namespace obg
