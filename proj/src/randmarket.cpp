#include "bmlab/randmarket.hpp"

#include <numeric>
#include <stdexcept>

namespace bmlab {

namespace {

constexpr std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

}  // namespace

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

Rng::Rng(std::uint64_t seed) {
  std::uint64_t x = seed;
  for (auto& word : s_) {
    word = mix64(x);
    x += 0x9E3779B97F4A7C15ULL;
  }
}

std::uint64_t Rng::next() {
  const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
  const std::uint64_t t = s_[1] << 17;
  s_[2] ^= s_[0];
  s_[3] ^= s_[1];
  s_[1] ^= s_[2];
  s_[0] ^= s_[3];
  s_[2] ^= t;
  s_[3] = rotl(s_[3], 45);
  return result;
}

std::uint32_t Rng::next32() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  const std::uint64_t v = next();
  spare_ = static_cast<std::uint32_t>(v);
  has_spare_ = true;
  return static_cast<std::uint32_t>(v >> 32);
}

std::uint64_t Rng::below(std::uint64_t bound) {
  if (bound == 0) throw std::invalid_argument("Rng::below: bound must be positive");
  if (bound <= (std::uint64_t{1} << 32)) {
    std::uint64_t m = static_cast<std::uint64_t>(next32()) * bound;
    auto low = static_cast<std::uint32_t>(m);
    if (low < bound) {
      const auto threshold = static_cast<std::uint32_t>((std::uint64_t{1} << 32) % bound);
      while (low < threshold) {
        m = static_cast<std::uint64_t>(next32()) * bound;
        low = static_cast<std::uint32_t>(m);
      }
    }
    return m >> 32;
  }
  unsigned __int128 m = static_cast<unsigned __int128>(next()) * bound;
  auto low = static_cast<std::uint64_t>(m);
  if (low < bound) {
    const std::uint64_t threshold = (0 - bound) % bound;
    while (low < threshold) {
      m = static_cast<unsigned __int128>(next()) * bound;
      low = static_cast<std::uint64_t>(m);
    }
  }
  return static_cast<std::uint64_t>(m >> 64);
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t rep) {
  return mix64(mix64(master) ^ (rep * 0xD1B54A32D192ED03ULL));
}

void shuffle_in_place(std::span<std::int32_t> values, Rng& rng) {
  for (std::size_t j = values.size(); j > 1; --j) {
    const std::size_t pick = rng.below(j);
    std::swap(values[j - 1], values[pick]);
  }
}

std::vector<std::int32_t> sample_permutation(std::size_t k, Rng& rng) {
  if (k == 0) throw std::invalid_argument("sample_permutation: k must be >= 1");
  std::vector<std::int32_t> p(k);
  std::iota(p.begin(), p.end(), 0);
  shuffle_in_place(p, rng);
  return p;
}

Market sample_market(std::size_t n, Rng& rng) {
  if (n == 0) throw std::invalid_argument("sample_market: n must be >= 1");
  auto fill = [&](RankingTable& t) {
    for (std::size_t r = 0; r < n; ++r) {
      auto row = t.row(r);
      std::iota(row.begin(), row.end(), 0);
      shuffle_in_place(row, rng);
    }
  };
  RankingTable prefs(n);
  RankingTable prios(n);
  fill(prefs);
  fill(prios);
  return Market(Market::Trusted{}, std::move(prefs), std::move(prios));
}

Market sample_market(std::size_t n, const SeedSpec& seed) {
  Rng rng(derive_seed(seed.master_seed, seed.rep_index));
  return sample_market(n, rng);
}

}  // namespace bmlab
