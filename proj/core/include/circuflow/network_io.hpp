#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "circuflow/network.hpp"
#include "circuflow/rankine.hpp"

namespace circuflow {

// Network files are JSON documents with top-level keys `materials`,
// `compartments`, `connections`, `unsustainable`, `return`, `simulation`.
//
// `simulation.time_unit_seconds` (default 1) is a file-level scale factor:
// dt, horizon, time constants and processing times are multiplied by it and
// kg-per-time-unit rates are divided by it, so everything in memory is SI.
// Sorter `item_rate` is always items per hour.

struct LoadOptions {
    bool validate = true;
};

/// Throws LoadError (syntax or schema problems, all of them) and, when
/// options.validate is set, ValidationError (all violations).
Network parse_network(std::string_view text, std::string_view origin = "<input>", LoadOptions options = {});
Network load_network(const std::filesystem::path& path, LoadOptions options = {});

/// SI-valued JSON document that parse_network reads back to an equal Network.
std::string serialize_network(const Network& net);

/// Optional `rankine` section: {"mass_flow": kg/s, "enthalpy": [h1, h2, h3, h4]}.
std::optional<RankineState> load_rankine(const std::filesystem::path& path);

struct VariantEntry {
    std::string name;
    std::filesystem::path path;
};

/// Compare manifest: {"variants": [{"name": ..., "path": ...}]}; paths resolve
/// relative to the manifest.
std::vector<VariantEntry> load_manifest(const std::filesystem::path& path);

std::string read_text_file(const std::filesystem::path& path);

/// 64-bit FNV-1a of the bytes, as 16 lowercase hex digits.
std::string content_hash(std::string_view bytes);

}  // namespace circuflow
