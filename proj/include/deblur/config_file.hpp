#pragma once

#include <filesystem>
#include <map>
#include <string>

#include "deblur/estimator.hpp"
#include "deblur/restore.hpp"

namespace deblur {

using Settings = std::map<std::string, std::string>;

// key=value per line; '#' starts a comment, blank lines are skipped.
Settings read_settings(std::istream& in);
Settings load_settings(const std::filesystem::path& path);

// Applies one key to whichever config owns it. Returns false for unknown keys;
// throws Parameter when the value does not parse.
bool apply_setting(const std::string& key, const std::string& value, EstimationConfig& est, RestoreConfig& rest);

// Every tunable with its current value, in the same key=value vocabulary.
Settings materialize(const EstimationConfig& est, const RestoreConfig& rest);

}  // namespace deblur
