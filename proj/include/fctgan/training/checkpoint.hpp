#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include "fctgan/training/trainer.hpp"

namespace fctgan {

/// Malformed, truncated, or mismatched checkpoint.
class CheckpointError : public DataError {
 public:
  using DataError::DataError;
};

inline constexpr char kCheckpointMagic[8] = {'F', 'C', 'T', 'G', 'A', 'N', 'C', 'K'};
inline constexpr std::uint32_t kCheckpointVersion = 1;

/// Serialized checkpoint; byte-identical for identical models. The layout
/// is described in docs/checkpoint_format.md.
std::string encode_checkpoint(const AnyModel& model);

/// Throws CheckpointError on a bad container, an unknown version, or, when
/// `expected_schema_hash` is given, a schema mismatch.
AnyModel decode_checkpoint(const std::string& bytes, std::optional<std::uint64_t> expected_schema_hash = {});

void save_checkpoint(const std::filesystem::path& path, const AnyModel& model);
AnyModel load_checkpoint(const std::filesystem::path& path, std::optional<std::uint64_t> expected_schema_hash = {});

}  // namespace fctgan
