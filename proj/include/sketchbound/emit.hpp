#pragma once

#include "sketchbound/lab.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace sketchbound {

/// Header k,p,oversampling,q,norm,metric,empirical_mean,empirical_std followed
/// by one column per variant; values use 17 significant digits and a variant
/// that does not apply to a row leaves its cell empty.
std::string rows_to_csv(const std::vector<SweepRow>& rows, const std::vector<std::string>& variants);
std::vector<SweepRow> rows_from_csv(const std::string& text, std::vector<std::string>* variants = nullptr);

/// JSON array of row objects; bounds live in a nested "bounds" object.
std::string rows_to_json(const std::vector<SweepRow>& rows);
std::vector<SweepRow> rows_from_json(const std::string& text);

/// Writes rows atomically in "csv" or "json" format.
void emit(const std::vector<SweepRow>& rows, const std::vector<std::string>& variants,
          const std::string& format, const std::filesystem::path& path);

}  // namespace sketchbound
