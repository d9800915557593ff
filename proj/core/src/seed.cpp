#include "lepl/seed.hpp"

namespace lepl {

namespace {

constexpr std::uint64_t kFnvOffset = 0xcbf29ce484222325ULL;
constexpr std::uint64_t kFnvPrime = 0x100000001b3ULL;

std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t seed, std::string_view stage) noexcept {
  std::uint64_t h = kFnvOffset;
  for (const char ch : stage) {
    h ^= static_cast<unsigned char>(ch);
    h *= kFnvPrime;
  }
  return splitmix64(splitmix64(seed) ^ h);
}

}  // namespace lepl
