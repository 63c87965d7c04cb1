#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "scb/model.hpp"

namespace scb {

// splitmix64: tiny, seedable, identical on every platform. The standard
// distributions are not portable across library implementations, so all
// sampling here is hand-rolled on top of raw 64-bit draws.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }
    // Uniform in [0, n).
    std::uint64_t below(std::uint64_t n) { return n ? next() % n : 0; }
    // Uniform in [0, 1).
    double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
    bool bernoulli(double p) { return uniform01() < p; }
    // Knuth's product-of-uniforms sampler; fine for the small means used here.
    long long poisson(double mean);

  private:
    std::uint64_t state_;
};

struct SeedConfig {
    long long seed = 42;
    long long users = 50;
    long long max_projects_per_user = 4;
    double follow_prob = 0.05;
    double favorite_prob = 0.05;
    double love_mean = 2.0;
    double comment_mean = 1.5;
    std::vector<std::string> countries = {"USA",   "Spain",  "UK",    "Germany",
                                          "India", "Brazil", "Japan", "Canada"};
};

// Parse a JSON config file; absent keys keep defaults, unknown keys and
// out-of-range values are configuration errors naming the field.
SeedConfig parse_seed_config(const std::string& text);
void validate_seed_config(const SeedConfig& config);

CommunityStore load_seed(const SeedConfig& config);

}  // namespace scb
