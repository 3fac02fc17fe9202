#pragma once

#include <filesystem>
#include <istream>
#include <string>
#include <vector>

#include "pedcross/domain.hpp"

namespace pedcross {

// Trial CSV schema (comma separated, UTF-8, one header row):
//   pair_id, driver_age, driver_gender, driver_svo, driver_aiss,
//   ped_age, ped_gender, ped_svo, ped_aiss,
//   tta, waiting_time, location, decision, cit, cd
// cit/cd are empty for waiting trials; gender in {F, M};
// location in {zebra, non_zebra}.

extern const char* const kTrialCsvHeader;

struct IngestReject {
    std::size_t line;     // 1-based line number in the source file
    std::string reason;
};

struct IngestResult {
    std::vector<Trial> trials;          // validated rows, in file order
    std::vector<IngestReject> rejects;
    std::vector<std::string> warnings;  // e.g. real-valued ages truncated
};

// Shortest round-trip decimal rendering; parse(format_double(x)) == x.
std::string format_double(double v);

std::string trial_to_csv_row(const Trial& trial);
std::string trials_to_csv(const std::vector<Trial>& trials);
void write_trials_csv(const std::vector<Trial>& trials, const std::filesystem::path& path);

// Parses the schema above. A malformed header throws IoError; malformed or
// invariant-violating rows land in `rejects` with their line number.
IngestResult parse_trials_csv(std::istream& in);
IngestResult read_trials_csv(const std::filesystem::path& path);

// Convenience for pipelines that require clean data: throws IoError naming
// the first reject if any row failed validation.
std::vector<Trial> read_trials_csv_strict(const std::filesystem::path& path);

}  // namespace pedcross
