#pragma once

// CSV persistence for sampled fields.  One artifact file holds `# key=value`
// metadata lines, a column header, then one row per grid node in node-major
// order with columns x1, x2, f, d1, d2, d11, d12, d22, weight.  Doubles are
// written with %.17g so a write/read cycle reproduces every bit.

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "lkc/errors.hpp"
#include "lkc/field.hpp"

namespace lkc {

inline std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline double parse_double(const std::string& s, const std::string& where) {
    errno = 0;
    char* end = nullptr;
    double v = std::strtod(s.c_str(), &end);
    // ERANGE with a finite result is a subnormal underflow, which is a
    // representable value; only overflow and trailing garbage are errors
    if (end == s.c_str() || *end != '\0' ||
        (errno == ERANGE && !std::isfinite(v)))
        throw MalformedRecord(where + ": bad number '" + s + "'");
    return v;
}

inline long long parse_ll(const std::string& s, const std::string& where) {
    errno = 0;
    char* end = nullptr;
    long long v = std::strtoll(s.c_str(), &end, 10);
    if (end == s.c_str() || *end != '\0' || errno == ERANGE)
        throw MalformedRecord(where + ": bad integer '" + s + "'");
    return v;
}

inline std::uint64_t parse_u64(const std::string& s, const std::string& where) {
    errno = 0;
    char* end = nullptr;
    unsigned long long v = std::strtoull(s.c_str(), &end, 10);
    if (end == s.c_str() || *end != '\0' || errno == ERANGE)
        throw MalformedRecord(where + ": bad integer '" + s + "'");
    return static_cast<std::uint64_t>(v);
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    out.push_back(cur);
    return out;
}

inline constexpr const char* kFieldCsvHeader =
    "x1,x2,f,d1,d2,d11,d12,d22,weight";

inline void write_field_csv(const FieldGrid& g, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoFailure("write_field_csv: cannot open " + path);
    out << "# manifold=" << manifold_name(g.spec.manifold) << "\n";
    out << "# n=" << g.spec.n << "\n";
    out << "# eigenvalue=" << format_double(g.spec.eigenvalue) << "\n";
    out << "# seed=" << g.spec.seed << "\n";
    out << "# rows=" << g.rows << "\n";
    out << "# cols=" << g.cols << "\n";
    if (g.spec.manifold == Manifold::Sphere) {
        out << "# pole_north=" << format_double(g.pole_north) << "\n";
        out << "# pole_south=" << format_double(g.pole_south) << "\n";
        out << "# excluded_rows=" << g.excluded_rows << "\n";
        out << "# excluded_weight=" << format_double(g.excluded_weight) << "\n";
    }
    out << kFieldCsvHeader << "\n";
    const std::size_t m = g.size();
    for (std::size_t i = 0; i < m; ++i) {
        out << format_double(g.x1[i]) << ',' << format_double(g.x2[i]) << ','
            << format_double(g.f[i]) << ',' << format_double(g.d1[i]) << ','
            << format_double(g.d2[i]) << ',' << format_double(g.d11[i]) << ','
            << format_double(g.d12[i]) << ',' << format_double(g.d22[i]) << ','
            << format_double(g.weight[i]) << "\n";
    }
    if (!out) throw IoFailure("write_field_csv: write failed for " + path);
}

inline FieldGrid read_field_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoFailure("read_field_csv: cannot open " + path);

    std::map<std::string, std::string> meta;
    std::string line;
    bool saw_header = false;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.rfind("# ", 0) == 0) {
            const std::string kv = line.substr(2);
            const std::size_t eq = kv.find('=');
            if (eq == std::string::npos)
                throw MalformedRecord("read_field_csv: bad metadata line '" + line + "'");
            meta[kv.substr(0, eq)] = kv.substr(eq + 1);
            continue;
        }
        if (line == kFieldCsvHeader) {
            saw_header = true;
            break;
        }
        throw MalformedRecord("read_field_csv: unexpected line '" + line + "'");
    }
    if (!saw_header)
        throw MalformedRecord("read_field_csv: missing column header in " + path);

    auto need = [&](const char* key) -> const std::string& {
        auto it = meta.find(key);
        if (it == meta.end())
            throw MalformedRecord(std::string("read_field_csv: missing metadata '") +
                                  key + "'");
        return it->second;
    };

    FieldGrid g;
    const std::string& mname = need("manifold");
    if (mname == "torus")
        g.spec.manifold = Manifold::Torus;
    else if (mname == "sphere")
        g.spec.manifold = Manifold::Sphere;
    else
        throw MalformedRecord("read_field_csv: unknown manifold '" + mname + "'");
    g.spec.n = parse_ll(need("n"), "metadata n");
    g.spec.eigenvalue = parse_double(need("eigenvalue"), "metadata eigenvalue");
    g.spec.seed = parse_u64(need("seed"), "metadata seed");
    g.rows = static_cast<int>(parse_ll(need("rows"), "metadata rows"));
    g.cols = static_cast<int>(parse_ll(need("cols"), "metadata cols"));
    if (g.rows <= 0 || g.cols <= 0)
        throw MalformedRecord("read_field_csv: non-positive grid shape");
    if (g.spec.manifold == Manifold::Sphere) {
        g.pole_north = parse_double(need("pole_north"), "metadata pole_north");
        g.pole_south = parse_double(need("pole_south"), "metadata pole_south");
        g.excluded_rows =
            static_cast<int>(parse_ll(need("excluded_rows"), "metadata excluded_rows"));
        g.excluded_weight =
            parse_double(need("excluded_weight"), "metadata excluded_weight");
    }
    g.allocate();

    const std::size_t m = g.size();
    for (std::size_t i = 0; i < m; ++i) {
        if (!std::getline(in, line))
            throw MalformedRecord("read_field_csv: expected " + std::to_string(m) +
                                  " rows, found " + std::to_string(i));
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const std::vector<std::string> c = split_csv_line(line);
        if (c.size() != 9)
            throw MalformedRecord("read_field_csv: row " + std::to_string(i) +
                                  " has " + std::to_string(c.size()) + " columns");
        const std::string where = "row " + std::to_string(i);
        g.x1[i] = parse_double(c[0], where);
        g.x2[i] = parse_double(c[1], where);
        g.f[i] = parse_double(c[2], where);
        g.d1[i] = parse_double(c[3], where);
        g.d2[i] = parse_double(c[4], where);
        g.d11[i] = parse_double(c[5], where);
        g.d12[i] = parse_double(c[6], where);
        g.d22[i] = parse_double(c[7], where);
        g.weight[i] = parse_double(c[8], where);
    }
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (!line.empty())
            throw MalformedRecord("read_field_csv: trailing content after grid rows");
    }
    if (g.spec.manifold == Manifold::Sphere) {
        g.theta_nodes.resize(g.rows);
        for (int i = 0; i < g.rows; ++i) g.theta_nodes[i] = g.x1[g.idx(i, 0)];
    }
    return g;
}

} // namespace lkc
