#include "pedcross/csv_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "pedcross/errors.hpp"

namespace pedcross {

const char* const kTrialCsvHeader =
    "pair_id,driver_age,driver_gender,driver_svo,driver_aiss,"
    "ped_age,ped_gender,ped_svo,ped_aiss,"
    "tta,waiting_time,location,decision,cit,cd";

std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            fields.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur.push_back(c);
        }
    }
    fields.push_back(cur);
    return fields;
}

bool parse_double(const std::string& s, double& out) {
    const char* begin = s.data();
    const char* end = begin + s.size();
    const auto res = std::from_chars(begin, end, out);
    return res.ec == std::errc{} && res.ptr == end;
}

// Ages are whole years; real-valued ages are accepted and truncated toward
// zero with a warning.
bool parse_age(const std::string& s, const char* field, std::size_t line, int& out,
               std::vector<std::string>& warnings) {
    double v = 0.0;
    if (!parse_double(s, v) || !std::isfinite(v)) return false;
    const int truncated = static_cast<int>(v);
    if (static_cast<double>(truncated) != v) {
        std::ostringstream w;
        w << "line " << line << ": " << field << " " << s << " truncated to " << truncated;
        warnings.push_back(w.str());
    }
    out = truncated;
    return true;
}

bool parse_gender(const std::string& s, Gender& out) {
    if (s == "F") { out = Gender::female; return true; }
    if (s == "M") { out = Gender::male; return true; }
    return false;
}

bool parse_location(const std::string& s, Location& out) {
    if (s == "zebra") { out = Location::zebra; return true; }
    if (s == "non_zebra") { out = Location::non_zebra; return true; }
    return false;
}

}  // namespace

std::string trial_to_csv_row(const Trial& t) {
    std::string row;
    row += t.pair_id;
    row += ',';
    row += std::to_string(t.driver.age);
    row += ',';
    row += to_string(t.driver.gender);
    row += ',';
    row += format_double(t.driver.svo);
    row += ',';
    row += format_double(t.driver.aiss);
    row += ',';
    row += std::to_string(t.pedestrian.age);
    row += ',';
    row += to_string(t.pedestrian.gender);
    row += ',';
    row += format_double(t.pedestrian.svo);
    row += ',';
    row += format_double(t.pedestrian.aiss);
    row += ',';
    row += format_double(t.tta);
    row += ',';
    row += format_double(t.waiting_time);
    row += ',';
    row += to_string(t.location);
    row += ',';
    row += std::to_string(t.outcome.decision);
    row += ',';
    if (t.outcome.cit) row += format_double(*t.outcome.cit);
    row += ',';
    if (t.outcome.cd) row += format_double(*t.outcome.cd);
    return row;
}

std::string trials_to_csv(const std::vector<Trial>& trials) {
    std::string out = kTrialCsvHeader;
    out += '\n';
    for (const Trial& t : trials) {
        out += trial_to_csv_row(t);
        out += '\n';
    }
    return out;
}

void write_trials_csv(const std::vector<Trial>& trials, const std::filesystem::path& path) {
    if (path.has_parent_path()) {
        std::error_code ec;
        std::filesystem::create_directories(path.parent_path(), ec);
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open for writing: " + path.string());
    out << trials_to_csv(trials);
    if (!out) throw IoError("write failed: " + path.string());
}

IngestResult parse_trials_csv(std::istream& in) {
    IngestResult result;
    std::string line;
    if (!std::getline(in, line)) throw IoError("empty CSV input");
    // tolerate a trailing \r from CRLF files
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != kTrialCsvHeader) {
        throw IoError("unexpected CSV header; expected: " + std::string(kTrialCsvHeader));
    }

    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        const auto fields = split_csv_line(line);
        if (fields.size() != 15) {
            result.rejects.push_back({line_no, "expected 15 fields, got " +
                                                   std::to_string(fields.size())});
            continue;
        }

        Trial t;
        std::string reason;
        t.pair_id = fields[0];
        t.driver.id = t.pair_id + "_d";
        t.driver.role = Role::driver;
        t.pedestrian.id = t.pair_id + "_p";
        t.pedestrian.role = Role::pedestrian;

        auto fail = [&](const std::string& why) { reason = why; };

        if (t.pair_id.empty()) fail("empty pair_id");
        if (reason.empty() && !parse_age(fields[1], "driver_age", line_no, t.driver.age,
                                         result.warnings))
            fail("bad driver_age: " + fields[1]);
        if (reason.empty() && !parse_gender(fields[2], t.driver.gender))
            fail("bad driver_gender: " + fields[2]);
        if (reason.empty() && !parse_double(fields[3], t.driver.svo))
            fail("bad driver_svo: " + fields[3]);
        if (reason.empty() && !parse_double(fields[4], t.driver.aiss))
            fail("bad driver_aiss: " + fields[4]);
        if (reason.empty() && !parse_age(fields[5], "ped_age", line_no, t.pedestrian.age,
                                         result.warnings))
            fail("bad ped_age: " + fields[5]);
        if (reason.empty() && !parse_gender(fields[6], t.pedestrian.gender))
            fail("bad ped_gender: " + fields[6]);
        if (reason.empty() && !parse_double(fields[7], t.pedestrian.svo))
            fail("bad ped_svo: " + fields[7]);
        if (reason.empty() && !parse_double(fields[8], t.pedestrian.aiss))
            fail("bad ped_aiss: " + fields[8]);
        if (reason.empty() && !parse_double(fields[9], t.tta))
            fail("bad tta: " + fields[9]);
        if (reason.empty() && !parse_double(fields[10], t.waiting_time))
            fail("bad waiting_time: " + fields[10]);
        if (reason.empty() && !parse_location(fields[11], t.location))
            fail("bad location: " + fields[11]);
        if (reason.empty()) {
            if (fields[12] == "0") {
                t.outcome.decision = 0;
            } else if (fields[12] == "1") {
                t.outcome.decision = 1;
            } else {
                fail("bad decision: " + fields[12]);
            }
        }
        if (reason.empty() && !fields[13].empty()) {
            double v;
            if (!parse_double(fields[13], v)) fail("bad cit: " + fields[13]);
            else t.outcome.cit = v;
        }
        if (reason.empty() && !fields[14].empty()) {
            double v;
            if (!parse_double(fields[14], v)) fail("bad cd: " + fields[14]);
            else t.outcome.cd = v;
        }

        if (reason.empty()) {
            const auto violations = validate_trial(t);
            if (!violations.empty()) {
                std::string joined;
                for (const auto& v : violations) {
                    if (!joined.empty()) joined += "; ";
                    joined += v;
                }
                reason = joined;
            }
        }

        if (reason.empty()) {
            result.trials.push_back(std::move(t));
        } else {
            result.rejects.push_back({line_no, reason});
        }
    }
    return result;
}

IngestResult read_trials_csv(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open: " + path.string());
    return parse_trials_csv(in);
}

std::vector<Trial> read_trials_csv_strict(const std::filesystem::path& path) {
    IngestResult res = read_trials_csv(path);
    if (!res.rejects.empty()) {
        const auto& r = res.rejects.front();
        throw IoError(path.string() + ": " + std::to_string(res.rejects.size()) +
                      " invalid row(s); first at line " + std::to_string(r.line) + ": " +
                      r.reason);
    }
    return std::move(res.trials);
}

}  // namespace pedcross
