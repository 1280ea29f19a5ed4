#include "core/instance.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "core/error.hpp"

namespace spinglass {

CouplingDistribution CouplingDistribution::mixture(double mu_tilde) {
    if (!(mu_tilde >= 0.0 && mu_tilde <= 1.0))
        fail(Errc::invalid_argument, "mixture mean offset must lie in [0,1], got " +
                                         format_shortest(mu_tilde));
    return {CouplingKind::Mixture, mu_tilde};
}

std::string CouplingDistribution::tag() const {
    switch (kind) {
    case CouplingKind::PlusMinusJ: return "pmj";
    case CouplingKind::Gaussian: return "gauss";
    case CouplingKind::Mixture: return "mix";
    }
    return "pmj";
}

SpinGlassInstance::SpinGlassInstance(int side, CouplingDistribution dist, uint64_t seed,
                                     std::vector<double> couplings,
                                     std::optional<double> ground_energy)
    : side_(side), dist_(dist), seed_(seed), couplings_(std::move(couplings)),
      ground_energy_(ground_energy) {
    if (side_ < 3)
        fail(Errc::invalid_argument,
             "lattice side must be >= 3, got " + std::to_string(side_));
    if (static_cast<int>(couplings_.size()) != num_edges())
        fail(Errc::invalid_argument, "expected " + std::to_string(num_edges()) +
                                         " couplings, got " +
                                         std::to_string(couplings_.size()));
    int n = num_spins();
    right_.resize(n);
    down_.resize(n);
    left_.resize(n);
    up_.resize(n);
    for (int i = 0; i < n; ++i) {
        int row = i / side_, col = i % side_;
        right_[i] = row * side_ + (col + 1) % side_;
        down_[i] = ((row + 1) % side_) * side_ + col;
        left_[i] = row * side_ + (col + side_ - 1) % side_;
        up_[i] = ((row + side_ - 1) % side_) * side_ + col;
    }
}

void SpinGlassInstance::edge(int e, int& i, int& j) const {
    if (e < 0 || e >= num_edges())
        fail(Errc::invalid_argument, "edge index out of range");
    i = e / 2;
    j = (e % 2 == 0) ? right_[i] : down_[i];
}

void SpinGlassInstance::check_compatible(const SpinConfiguration& c) const {
    if (static_cast<int>(c.size()) != num_spins())
        fail(Errc::invalid_argument, "configuration has " + std::to_string(c.size()) +
                                         " spins, instance has " +
                                         std::to_string(num_spins()));
}

double SpinGlassInstance::energy(const SpinConfiguration& c) const {
    check_compatible(c);
    double e = 0.0;
    int n = num_spins();
    for (int i = 0; i < n; ++i) {
        double si = c[i];
        e += si * couplings_[2 * i] * c[right_[i]];
        e += si * couplings_[2 * i + 1] * c[down_[i]];
    }
    return e;
}

double SpinGlassInstance::delta_energy(const SpinConfiguration& c, int k) const {
    check_compatible(c);
    if (k < 0 || k >= num_spins())
        fail(Errc::invalid_argument, "spin index out of range: " + std::to_string(k));
    double field = couplings_[2 * k] * c[right_[k]] + couplings_[2 * k + 1] * c[down_[k]] +
                   couplings_[2 * left_[k]] * c[left_[k]] +
                   couplings_[2 * up_[k] + 1] * c[up_[k]];
    return -2.0 * c[k] * field;
}

SpinGlassInstance generate_instance(int side, CouplingDistribution dist, uint64_t seed) {
    if (side < 3)
        fail(Errc::invalid_argument,
             "lattice side must be >= 3, got " + std::to_string(side));
    if (dist.kind == CouplingKind::Mixture && !(dist.mu_tilde >= 0.0 && dist.mu_tilde <= 1.0))
        fail(Errc::invalid_argument, "mixture mean offset must lie in [0,1]");

    Rng rng(derive_seed(seed, "couplings"));
    int num_edges = 2 * side * side;
    std::vector<double> couplings(num_edges);
    switch (dist.kind) {
    case CouplingKind::PlusMinusJ:
        for (double& j : couplings)
            j = static_cast<double>(rng.next_sign());
        break;
    case CouplingKind::Gaussian:
        for (double& j : couplings)
            j = rng.next_gaussian();
        break;
    case CouplingKind::Mixture: {
        double sigma = std::sqrt(std::max(0.0, dist.sigma_tilde_sq()));
        for (double& j : couplings) {
            j = rng.next_sign() * dist.mu_tilde;
            // sigma = 0 consumes no Gaussian draw, so mu_tilde = 1 reproduces
            // the +/-J stream bit for bit
            if (sigma > 0.0)
                j += sigma * rng.next_gaussian();
        }
        break;
    }
    }
    return SpinGlassInstance(side, dist, seed, std::move(couplings));
}

SpinConfiguration random_configuration(int num_spins, Rng& rng) {
    SpinConfiguration c(num_spins);
    for (auto& s : c)
        s = static_cast<int8_t>(rng.next_sign());
    return c;
}

std::string format_shortest(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

std::string format_g17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string write_instance(const SpinGlassInstance& inst) {
    std::string out;
    out.reserve(32 * inst.num_edges());
    out += "ising2d v1\n";
    out += "L " + std::to_string(inst.side()) + "\n";
    out += "dist " + inst.distribution().tag();
    if (inst.distribution().kind == CouplingKind::Mixture)
        out += " " + format_shortest(inst.distribution().mu_tilde);
    out += "\n";
    out += "seed " + std::to_string(inst.seed()) + "\n";
    if (inst.ground_energy())
        out += "ground_energy " + format_shortest(*inst.ground_energy()) + "\n";
    for (int e = 0; e < inst.num_edges(); ++e) {
        int i, j;
        inst.edge(e, i, j);
        out += std::to_string(i) + " " + std::to_string(j) + " " +
               format_g17(inst.couplings()[e]) + "\n";
    }
    return out;
}

namespace {

[[noreturn]] void parse_fail(int line_no, const std::string& what) {
    fail(Errc::parse, "line " + std::to_string(line_no) + ": " + what);
}

struct LineReader {
    std::istringstream in;
    int line_no = 0;
    bool next(std::string& line) {
        while (std::getline(in, line)) {
            ++line_no;
            if (!line.empty() && line.back() == '\r')
                line.pop_back();
            return true;
        }
        return false;
    }
};

bool parse_double(const std::string& s, double& out) {
    auto res = std::from_chars(s.data(), s.data() + s.size(), out);
    return res.ec == std::errc{} && res.ptr == s.data() + s.size();
}

std::vector<std::string> split_ws(const std::string& line) {
    std::vector<std::string> fields;
    std::istringstream s(line);
    std::string f;
    while (s >> f)
        fields.push_back(f);
    return fields;
}

} // namespace

SpinGlassInstance parse_instance(const std::string& text) {
    LineReader reader;
    reader.in.str(text);
    std::string line;

    if (!reader.next(line) || line != "ising2d v1")
        parse_fail(1, "expected header 'ising2d v1'");

    if (!reader.next(line))
        parse_fail(reader.line_no + 1, "missing 'L <int>' line");
    auto fields = split_ws(line);
    int side = 0;
    if (fields.size() != 2 || fields[0] != "L" ||
        std::from_chars(fields[1].data(), fields[1].data() + fields[1].size(), side).ec !=
            std::errc{})
        parse_fail(reader.line_no, "expected 'L <int>'");
    if (side < 3)
        parse_fail(reader.line_no, "lattice side must be >= 3");

    if (!reader.next(line))
        parse_fail(reader.line_no + 1, "missing 'dist' line");
    fields = split_ws(line);
    CouplingDistribution dist;
    if (fields.size() >= 2 && fields[0] == "dist" && fields[1] == "pmj" && fields.size() == 2)
        dist = CouplingDistribution::plus_minus_j();
    else if (fields.size() >= 2 && fields[0] == "dist" && fields[1] == "gauss" &&
             fields.size() == 2)
        dist = CouplingDistribution::gaussian();
    else if (fields.size() == 3 && fields[0] == "dist" && fields[1] == "mix") {
        double mu;
        if (!parse_double(fields[2], mu) || !(mu >= 0.0 && mu <= 1.0))
            parse_fail(reader.line_no, "mixture mean offset must be a real in [0,1]");
        dist = CouplingDistribution::mixture(mu);
    } else {
        parse_fail(reader.line_no, "expected 'dist <pmj|gauss|mix> [mu_tilde]'");
    }

    if (!reader.next(line))
        parse_fail(reader.line_no + 1, "missing 'seed <u64>' line");
    fields = split_ws(line);
    uint64_t seed = 0;
    if (fields.size() != 2 || fields[0] != "seed" ||
        std::from_chars(fields[1].data(), fields[1].data() + fields[1].size(), seed).ec !=
            std::errc{})
        parse_fail(reader.line_no, "expected 'seed <u64>'");

    std::optional<double> ground;
    bool pending = false;
    std::string pending_line;
    if (reader.next(line)) {
        fields = split_ws(line);
        if (!fields.empty() && fields[0] == "ground_energy") {
            double g;
            if (fields.size() != 2 || !parse_double(fields[1], g))
                parse_fail(reader.line_no, "expected 'ground_energy <real>'");
            ground = g;
        } else {
            pending = true;
            pending_line = line;
        }
    }

    int expected = 2 * side * side;
    std::vector<double> couplings;
    couplings.reserve(expected);
    auto consume_coupling = [&](const std::string& l, int line_no) {
        auto f = split_ws(l);
        if (f.empty())
            return; // tolerate blank lines
        if (static_cast<int>(couplings.size()) == expected)
            parse_fail(line_no, "expected " + std::to_string(expected) +
                                    " couplings, found extra content");
        int i = 0, j = 0;
        double value = 0.0;
        if (f.size() != 3 ||
            std::from_chars(f[0].data(), f[0].data() + f[0].size(), i).ec != std::errc{} ||
            std::from_chars(f[1].data(), f[1].data() + f[1].size(), j).ec != std::errc{})
            parse_fail(line_no, "expected '<i> <j> <J_ij>'");
        if (!parse_double(f[2], value))
            parse_fail(line_no, "coupling value is not numeric: '" + f[2] + "'");
        int e = static_cast<int>(couplings.size());
        int node = e / 2, row = node / side, col = node % side;
        int want_j = (e % 2 == 0) ? row * side + (col + 1) % side
                                  : ((row + 1) % side) * side + col;
        if (i != node || j != want_j)
            parse_fail(line_no, "bond " + std::to_string(e) + " must connect " +
                                    std::to_string(node) + " and " + std::to_string(want_j) +
                                    " (canonical order), got " + std::to_string(i) + " and " +
                                    std::to_string(j));
        couplings.push_back(value);
    };

    if (pending)
        consume_coupling(pending_line, reader.line_no);
    while (reader.next(line))
        consume_coupling(line, reader.line_no);

    if (static_cast<int>(couplings.size()) != expected)
        parse_fail(reader.line_no, "expected " + std::to_string(expected) + " couplings, got " +
                                       std::to_string(couplings.size()));

    return SpinGlassInstance(side, dist, seed, std::move(couplings), ground);
}

SpinGlassInstance read_instance_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        fail(Errc::io, "cannot open instance file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    try {
        return parse_instance(buf.str());
    } catch (const Error& e) {
        if (e.code() == Errc::parse)
            fail(Errc::parse, path + ": " + e.what());
        throw;
    }
}

void write_instance_file(const SpinGlassInstance& inst, const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        fail(Errc::io, "cannot open file for writing: " + path);
    out << write_instance(inst);
    if (!out)
        fail(Errc::io, "failed writing instance file: " + path);
}

void annotate_ground_energy_file(const std::string& path, double ground_energy) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        fail(Errc::io, "cannot open instance file: " + path);
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line))
        lines.push_back(line);
    in.close();
    if (lines.size() < 4)
        fail(Errc::parse, path + ": not an instance file");

    std::string entry = "ground_energy " + format_shortest(ground_energy);
    // the ground_energy line lives right after the seed line
    if (lines.size() > 4 && lines[4].rfind("ground_energy", 0) == 0)
        lines[4] = entry;
    else
        lines.insert(lines.begin() + 4, entry);

    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        fail(Errc::io, "cannot open file for writing: " + path);
    for (const auto& l : lines)
        out << l << "\n";
    if (!out)
        fail(Errc::io, "failed writing instance file: " + path);
}

} // namespace spinglass
