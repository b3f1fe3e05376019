#include "vortexlab/io.hpp"

#include "vortexlab/errors.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace vortexlab {

std::string format_double(double x) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), x);
    return std::string(buf, res.ptr);
}

double parse_double(const std::string& s) {
    double x = 0.0;
    const char* end = s.data() + s.size();
    const auto res = std::from_chars(s.data(), end, x);
    if (res.ec != std::errc() || res.ptr != end) throw InvalidConfig("field csv: malformed number \"" + s + "\"");
    return x;
}

void write_field_csv(std::ostream& os, const CylinderField& f) {
    os << "t,theta";
    for (int j = 1; j <= f.n; ++j) os << ",re_u_" << j << ",im_u_" << j;
    for (int a = 1; a <= f.d; ++a) os << ",eta_" << a;
    if (!f.temporal())
        for (int a = 1; a <= f.d; ++a) os << ",At_" << a;
    os << '\n';
    const Grid& g = f.grid;
    for (int i = 0; i < g.Nt; ++i) {
        for (int k = 0; k < g.Ntheta; ++k) {
            os << format_double(g.t(i)) << ',' << format_double(g.theta(k));
            for (int j = 0; j < f.n; ++j)
                os << ',' << format_double(f.u[j](i, k).real()) << ',' << format_double(f.u[j](i, k).imag());
            for (int a = 0; a < f.d; ++a) os << ',' << format_double(f.eta[a](i, k));
            if (!f.temporal())
                for (int a = 0; a < f.d; ++a) os << ',' << format_double(f.At[a](i, k));
            os << '\n';
        }
    }
}

namespace {

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream ss(line);
    while (std::getline(ss, cell, ',')) out.push_back(cell);
    return out;
}

}  // namespace

CylinderField read_field_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line)) throw InvalidConfig("field csv: missing header");
    const auto header = split(line);
    if (header.size() < 3 || header[0] != "t" || header[1] != "theta") throw InvalidConfig("field csv: bad header");
    int n = 0, d = 0, nat = 0;
    for (size_t c = 2; c < header.size(); ++c) {
        if (header[c].rfind("re_u_", 0) == 0) ++n;
        else if (header[c].rfind("eta_", 0) == 0) ++d;
        else if (header[c].rfind("At_", 0) == 0) ++nat;
    }
    if (n < 1 || d < 1 || (nat != 0 && nat != d) || header.size() != size_t(2 + 2 * n + d + nat))
        throw InvalidConfig("field csv: inconsistent header");

    std::vector<std::vector<double>> rows;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        const auto cells = split(line);
        if (cells.size() != header.size()) throw InvalidConfig("field csv: row width differs from header");
        std::vector<double> r(cells.size());
        for (size_t c = 0; c < cells.size(); ++c) r[c] = parse_double(cells[c]);
        rows.push_back(std::move(r));
    }
    if (rows.empty()) throw InvalidConfig("field csv: no data rows");
    int Ntheta = 0;
    while (Ntheta < int(rows.size()) && rows[Ntheta][0] == rows[0][0]) ++Ntheta;
    if (rows.size() % Ntheta != 0) throw GridMismatch("field csv: rows do not form a full grid");
    Grid g;
    g.Nt = int(rows.size()) / Ntheta;
    g.Ntheta = Ntheta;
    g.t0 = rows.front()[0];
    g.T = rows.back()[0];
    g.validate();

    CylinderField f = CylinderField::zeros(g, n, d, nat == 0);
    for (int i = 0; i < g.Nt; ++i) {
        for (int k = 0; k < Ntheta; ++k) {
            const auto& r = rows[size_t(i) * Ntheta + k];
            if (r[0] != rows[size_t(i) * Ntheta][0]) throw GridMismatch("field csv: t varies within a circle");
            int c = 2;
            for (int j = 0; j < n; ++j, c += 2) f.u[j](i, k) = cplx(r[c], r[c + 1]);
            for (int a = 0; a < d; ++a) f.eta[a](i, k) = r[c++];
            for (int a = 0; a < nat; ++a) f.At[a](i, k) = r[c++];
        }
    }
    return f;
}

void write_field_csv(const std::string& path, const CylinderField& f) {
    std::ostringstream os;
    write_field_csv(os, f);
    write_text(path, os.str());
}

CylinderField read_field_csv(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw InvalidConfig("field csv: cannot open " + path);
    return read_field_csv(is);
}

std::uint64_t fnv1a64(const std::string& bytes) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

std::string hex64(std::uint64_t h) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

namespace {

nlohmann::json finite_or_null(double x) { return std::isfinite(x) ? nlohmann::json(x) : nlohmann::json(nullptr); }

}  // namespace

nlohmann::json to_json(const SolveCertificate& c) {
    nlohmann::json j;
    j["iterations"] = c.iterations;
    j["residual_history"] = c.residual_history;
    j["final_residual_sup"] = c.final_residual_sup;
    j["final_residual_l2"] = c.final_residual_l2;
    j["boundary_mode"] = to_string(c.boundary_mode);
    j["boundary_weight"] = c.boundary_weight;
    j["band_residual_sup"] = c.band_residual_sup;
    j["cg_iterations"] = c.cg_iterations;
    return j;
}

nlohmann::json to_json(const RateFit& f) {
    return {{"slope", finite_or_null(f.slope)}, {"log_C", finite_or_null(f.intercept)}, {"r2", finite_or_null(f.r2)},
            {"t_start", f.t_start}, {"t_end", f.t_end}, {"first", f.first}, {"last", f.last}};
}

nlohmann::json to_json(const DecayReport& r) {
    nlohmann::json j;
    j["applicable"] = r.applicable;
    j["note"] = r.note;
    j["b"] = r.b;
    j["holonomy_order"] = r.holonomy_order;
    j["rate_floor"] = r.floor;
    j["delta"] = finite_or_null(r.delta);
    j["residual_sup"] = r.residual_sup;
    j["isoperimetric_c0"] = r.isoperimetric_c0;
    j["isoperimetric_floor"] = r.isoperimetric_floor;
    j["c1"] = r.c1;
    j["all_passed"] = r.all_passed();
    nlohmann::json fits = nlohmann::json::object(), own = nlohmann::json::object();
    for (const auto& [k, f] : r.fits) fits[k] = to_json(f);
    for (const auto& [k, f] : r.own_fits) own[k] = to_json(f);
    j["fits"] = fits;
    j["own_window_fits"] = own;
    nlohmann::json checks = nlohmann::json::array();
    for (const auto& c : r.checks)
        checks.push_back({{"name", c.name}, {"passed", c.passed}, {"value", finite_or_null(c.value)},
                          {"target", c.target}, {"margin", finite_or_null(c.margin)},
                          {"informational", c.informational}});
    j["checks"] = checks;
    return j;
}

void write_series_csv(std::ostream& os, const ObservableSet& obs) {
    os << "t,obs_name,value\n";
    for (const Series* s : obs.all()) {
        if (s->value.empty()) continue;
        for (size_t i = 0; i < s->value.size(); ++i)
            os << format_double(s->t[i]) << ',' << s->name << ',' << format_double(s->value[i]) << '\n';
    }
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw PreconditionFailed("cannot write " + path);
    os << text;
}

}  // namespace vortexlab
