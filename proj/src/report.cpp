#include <charconv>
#include <istream>
#include <ostream>
#include <sstream>

#include "json.hpp"

#include "rcs/core.hpp"
#include "rcs/error.hpp"
#include "rcs/estimators.hpp"

namespace rcs {

namespace {

template <class T>
T parse_number(const std::string& field) {
  T v{};
  const auto* first = field.data();
  const auto* last = field.data() + field.size();
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last)
    throw InvalidArgument("report CSV: bad number '" + field + "'");
  return v;
}

}  // namespace

void write_report_csv(std::ostream& out, std::span<const ExperimentReport> reports) {
  out << kReportCsvHeader << '\n';
  for (const auto& r : reports) {
    out << format_double(r.estimate) << ',' << format_double(r.std_error) << ','
        << format_double(r.ci_low) << ',' << format_double(r.ci_high) << ',' << r.n_rep << ','
        << (r.target ? format_double(*r.target) : "") << ',' << r.seed << ','
        << r.truncation_tally << '\n';
  }
}

std::vector<ExperimentReport> read_report_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kReportCsvHeader)
    throw InvalidArgument("report CSV has an unexpected header");
  std::vector<ExperimentReport> out;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cols;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) cols.push_back(field);
    if (!line.empty() && line.back() == ',') cols.emplace_back();
    if (cols.size() != 8) throw InvalidArgument("report CSV row needs 8 columns");
    ExperimentReport r;
    r.estimate = parse_number<double>(cols[0]);
    r.std_error = parse_number<double>(cols[1]);
    r.ci_low = parse_number<double>(cols[2]);
    r.ci_high = parse_number<double>(cols[3]);
    r.n_rep = parse_number<std::size_t>(cols[4]);
    if (!cols[5].empty()) r.target = parse_number<double>(cols[5]);
    r.seed = parse_number<std::uint64_t>(cols[6]);
    r.truncation_tally = parse_number<std::uint64_t>(cols[7]);
    out.push_back(r);
  }
  return out;
}

void write_report_jsonl(std::ostream& out, std::span<const ExperimentReport> reports,
                        const std::string& label) {
  for (const auto& r : reports) {
    nlohmann::ordered_json j;
    j["label"] = label;
    j["estimate"] = r.estimate;
    j["std_error"] = r.std_error;
    j["ci_low"] = r.ci_low;
    j["ci_high"] = r.ci_high;
    j["n_rep"] = r.n_rep;
    j["target"] = r.target ? nlohmann::ordered_json(*r.target) : nlohmann::ordered_json(nullptr);
    j["seed"] = r.seed;
    j["stream_id"] = r.stream_id;
    j["truncation_tally"] = r.truncation_tally;
    out << j.dump() << '\n';
  }
}

}  // namespace rcs
