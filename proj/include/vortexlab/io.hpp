#pragma once

#include "vortexlab/decay.hpp"
#include "vortexlab/solver.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>

#include "json.hpp"

namespace vortexlab {

/// Shortest decimal string that parses back to the same double.
std::string format_double(double x);
/// Parses a full decimal string; throws InvalidConfig on trailing garbage.
double parse_double(const std::string& s);

/// Field CSV: header `t,theta,re_u_1,im_u_1,...,eta_1,...[,At_1,...]`, one row per node, t-major.
void write_field_csv(std::ostream& os, const CylinderField& f);
CylinderField read_field_csv(std::istream& is);
void write_field_csv(const std::string& path, const CylinderField& f);
CylinderField read_field_csv(const std::string& path);

/// 64-bit FNV-1a.
std::uint64_t fnv1a64(const std::string& bytes);
std::string hex64(std::uint64_t h);

nlohmann::json to_json(const SolveCertificate& c);
nlohmann::json to_json(const RateFit& f);
nlohmann::json to_json(const DecayReport& r);

/// series.csv rows `t,obs_name,value` for every non-empty series.
void write_series_csv(std::ostream& os, const ObservableSet& obs);

/// Writes text to a file, throwing PreconditionFailed when the file cannot be opened.
void write_text(const std::string& path, const std::string& text);

}  // namespace vortexlab
