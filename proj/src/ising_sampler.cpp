#include <algorithm>
#include <cmath>
#include <sstream>

#include "mks/ising.hpp"
#include "mks/random.hpp"

namespace mks {

int SpinConfig::spin_at(Site s) const {
  if (auto i = domain->index_of(s)) return spins[*i];
  return 1;
}

double SpinConfig::magnetization() const {
  double m = 0.0;
  for (const auto s : spins) m += s;
  return m / static_cast<double>(spins.size());
}

int SpinConfig::negative_energy() const {
  int e = 0;
  const auto& sites = domain->sites();
  for (std::size_t i = 0; i < sites.size(); ++i)
    for (const Site d : kNeighborOffsets) {
      const Site n = sites[i] + d;
      if (auto j = domain->index_of(n)) {
        if (sites[i] < n) e += spins[i] * spins[*j];
      } else {
        e += spins[i];
      }
    }
  return e;
}

std::string encode_rle(const SpinConfig& sigma) {
  std::ostringstream out;
  std::size_t i = 0;
  while (i < sigma.spins.size()) {
    std::size_t j = i;
    while (j < sigma.spins.size() && sigma.spins[j] == sigma.spins[i]) ++j;
    out << (j - i) << (sigma.spins[i] > 0 ? '+' : '-');
    i = j;
  }
  return out.str();
}

SpinConfig decode_rle(std::shared_ptr<const DiscreteDomain> domain, const std::string& text) {
  SpinConfig sigma{std::move(domain), {}};
  std::size_t count = 0;
  bool have_digits = false;
  for (const char c : text) {
    if (c >= '0' && c <= '9') {
      count = count * 10 + static_cast<std::size_t>(c - '0');
      have_digits = true;
    } else if ((c == '+' || c == '-') && have_digits) {
      sigma.spins.insert(sigma.spins.end(), count, static_cast<std::int8_t>(c == '+' ? 1 : -1));
      count = 0;
      have_digits = false;
    } else if (c != '\n' && c != '\r') {
      throw Error(ErrorCode::SpecParseError, "malformed run-length spin record");
    }
  }
  if (have_digits || sigma.spins.size() != sigma.domain->size())
    throw Error(ErrorCode::SpecParseError, "run-length record does not match the domain size");
  return sigma;
}

WolffSampler::WolffSampler(DiscreteDomain domain, InverseTemperature beta, std::uint64_t seed)
    : domain_(std::make_shared<const DiscreteDomain>(std::move(domain))),
      add_probability_(1.0 - std::exp(-2.0 * beta.value())),
      rng_(seed) {
  const auto& sites = domain_->sites();
  neighbors_.resize(sites.size());
  for (std::size_t i = 0; i < sites.size(); ++i)
    for (std::size_t k = 0; k < 4; ++k) {
      if (auto j = domain_->index_of(sites[i] + kNeighborOffsets[k])) {
        neighbors_[i][k] = static_cast<int>(*j);
      } else {
        neighbors_[i][k] = -1;
        boundary_sites_.push_back(static_cast<int>(i));
      }
    }
  spins_.assign(sites.size(), 1);
}

void WolffSampler::step() {
  const std::size_t n = spins_.size();
  std::vector<char> in_cluster(n, 0);
  std::vector<int> stack, members;
  const std::size_t seed_index = static_cast<std::size_t>(uniform_index(rng_, n));
  const std::int8_t c = spins_[seed_index];
  auto try_add = [&](int j) {
    if (!in_cluster[static_cast<std::size_t>(j)] && spins_[static_cast<std::size_t>(j)] == c &&
        uniform01(rng_) < add_probability_) {
      in_cluster[static_cast<std::size_t>(j)] = 1;
      stack.push_back(j);
      members.push_back(j);
    }
  };
  bool ghost_in = false;
  in_cluster[seed_index] = 1;
  stack.push_back(static_cast<int>(seed_index));
  members.push_back(static_cast<int>(seed_index));
  while (!stack.empty()) {
    const int j = stack.back();
    stack.pop_back();
    for (const int k : neighbors_[static_cast<std::size_t>(j)]) {
      if (k >= 0) {
        try_add(k);
      } else if (!ghost_in && ghost_ == c && uniform01(rng_) < add_probability_) {
        ghost_in = true;
        for (const int b : boundary_sites_) try_add(b);
      }
    }
  }
  for (const int j : members) spins_[static_cast<std::size_t>(j)] = static_cast<std::int8_t>(-c);
  if (ghost_in) ghost_ = static_cast<std::int8_t>(-ghost_);
  if (ghost_ < 0) {
    for (auto& s : spins_) s = static_cast<std::int8_t>(-s);
    ghost_ = 1;
  }
}

SpinConfig WolffSampler::state() const { return {domain_, spins_}; }

std::vector<SpinConfig> sample_ising(const DiscreteDomain& domain, InverseTemperature beta,
                                     std::size_t n_samples, std::uint64_t seed, SamplerOptions options) {
  if (n_samples == 0) throw Error(ErrorCode::InvalidArgument, "n_samples must be >= 1");
  WolffSampler sampler(domain, beta, seed);
  for (std::size_t i = 0; i < options.burn_in; ++i) sampler.step();
  std::vector<SpinConfig> out;
  out.reserve(n_samples);
  for (std::size_t k = 0; k < n_samples; ++k) {
    for (std::size_t i = 0; i < std::max<std::size_t>(options.thinning, 1); ++i) sampler.step();
    out.push_back(sampler.state());
  }
  return out;
}

}  // namespace mks
