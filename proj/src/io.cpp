#include "wft/io.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>

#include "wft/errors.hpp"

namespace wft::io {

std::string format_number(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    if (x == 0.0) return "0";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::string quote(const std::string& s) {
    if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char c : s) {
        if (c == '"') q += '"';
        q += c;
    }
    return q + '"';
}

CsvWriter::CsvWriter(std::ostream& out, const std::vector<std::string>& header) : out_(out), cols_(header.size()) {
    for (const auto& h : header) *this << h;
    end_row();
}

void CsvWriter::sep() {
    if (col_++ > 0) out_ << ',';
}

CsvWriter& CsvWriter::operator<<(double x) {
    sep();
    out_ << format_number(x);
    return *this;
}

CsvWriter& CsvWriter::operator<<(long x) {
    sep();
    out_ << x;
    return *this;
}

CsvWriter& CsvWriter::operator<<(const std::string& s) {
    sep();
    out_ << quote(s);
    return *this;
}

void CsvWriter::end_row() {
    if (col_ != cols_) throw Error("csv row has " + std::to_string(col_) + " fields, expected " + std::to_string(cols_));
    out_ << "\r\n";
    col_ = 0;
}

void write_profiles(std::ostream& out, const RunHistory& h, const std::vector<double>& times,
                    const std::vector<double>& xs) {
    const ModelLaws& m = h.mesh->laws();
    CsvWriter w(out, {"t", "x", "rho", "v", "w1", "w2", "phase"});
    for (double t : times) {
        auto us = profile(h, t, xs);
        for (std::size_t i = 0; i < xs.size(); ++i) {
            RiemannCoords c = m.to_coords(us[i]);
            w << t << xs[i] << us[i].rho << us[i].v << c.w1 << c.w2 << to_string(us[i].phase);
            w.end_row();
        }
    }
}

void write_fronts(std::ostream& out, const RunHistory& h) {
    const GridMesh& g = *h.mesh;
    CsvWriter w(out, {"id", "t0", "t1", "x0", "x1", "speed", "kind", "rho_l", "v_l", "phase_l", "rho_r", "v_r",
                      "phase_r"});
    for (std::size_t i = 0; i < h.segments.size(); ++i) {
        const Front& f = h.segments[i];
        const TrafficState &l = g.state(f.left), &r = g.state(f.right);
        w << i << f.t0 << f.t_end << f.x0 << f.x(f.t_end) << f.speed << to_string(f.kind) << l.rho << l.v
          << to_string(l.phase) << r.rho << r.v << to_string(r.phase);
        w.end_row();
    }
}

void write_functionals(std::ostream& out, const RunHistory& h) {
    CsvWriter w(out, {"event", "t", "x", "tv", "temple", "waves", "phase_transitions", "d_tv", "d_temple"});
    for (std::size_t i = 0; i < h.log.size(); ++i) {
        const EventRecord& r = h.log[i];
        w << i << r.t << r.x << r.tv << r.temple << r.waves << r.pts << r.d_tv << r.d_temple;
        w.end_row();
    }
}

void write_entropy(std::ostream& out, const RunHistory& h, const EntropyReport& r) {
    CsvWriter w(out, {"front", "t0", "t1", "kind", "k", "family", "value"});
    const double vc = h.mesh->laws().V_c();
    for (const EntropyRecord& e : r.records) {
        const Front& f = h.segments[e.front];
        w << e.front << f.t0 << f.t_end << to_string(f.kind) << e.k << (e.k <= vc ? "arz" : "extended") << e.value;
        w.end_row();
    }
}

void write_entropy_summary(std::ostream& out, const EntropyReport& r) {
    CsvWriter w(out, {"quantity", "k", "value"});
    for (std::size_t i = 0; i < r.k_grid.size(); ++i) {
        w << "min_admissible" << r.k_grid[i] << r.min_per_k[i];
        w.end_row();
    }
    for (auto [name, v] : {std::pair{"min_admissible_overall", r.min_admissible},
                           {"negative_total", r.negative_total},
                           {"positive_total", r.positive_total},
                           {"rarefaction_strength", r.rarefaction_strength},
                           {"c_model", r.c_model},
                           {"eps_v", r.eps_v},
                           {"negative_bound", r.c_model * r.eps_v * r.rarefaction_strength}}) {
        w << name << "" << v;
        w.end_row();
    }
}

void write_ladder(std::ostream& out, const std::vector<LadderRow>& rows) {
    CsvWriter w(out, {"n", "events", "t_last_sim", "t_d1_closed", "t_last_exact", "rel_error_closed",
                      "abs_error_exact", "l1_probe", "negative_entropy"});
    for (const auto& r : rows) {
        w << r.n << r.events << r.t_last_sim << r.t_d1_closed << r.t_last_exact << r.error_closed << r.error_exact
          << r.l1_probe << r.negative_entropy;
        w.end_row();
    }
}

std::string iso_timestamp() {
    std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

void write_file(const std::filesystem::path& dir, const std::string& name, const std::string& text) {
    std::filesystem::create_directories(dir);
    std::ofstream f(dir / name, std::ios::binary);
    if (!f) throw Error("cannot write " + (dir / name).string());
    f << text;
    if (!f) throw Error("write failed for " + (dir / name).string());
}

}  // namespace wft::io
