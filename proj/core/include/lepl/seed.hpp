#pragma once

#include <cstdint>
#include <string_view>

namespace lepl {

/// Derives an independent stream seed for one pipeline stage from the single
/// user-facing seed. The mapping is fixed (FNV-1a over the stage name, mixed
/// with splitmix64) so every stage is reproducible on its own.
std::uint64_t derive_seed(std::uint64_t seed, std::string_view stage) noexcept;

}  // namespace lepl
