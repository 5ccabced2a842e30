#include "maext/spec_io.hpp"

#include <cstdio>
#include <fstream>
#include <map>
#include <cmath>
#include <sstream>

#include "maext/error.hpp"

namespace maext {

namespace {

using Section = std::map<std::string, std::string>;
using Sections = std::map<std::string, Section>;

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

Sections parse_sections(const std::string& text, const std::string& origin) {
    Sections out;
    std::string section;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find_first_of("#;");
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ParseError(origin + ":" + std::to_string(lineno) + ": malformed section");
            section = trim(line.substr(1, line.size() - 2));
            out[section];
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos || section.empty())
            throw ParseError(origin + ":" + std::to_string(lineno) +
                             ": expected 'key = value' inside a section");
        out[section][trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
    }
    return out;
}

class SectionReader {
public:
    SectionReader(const Sections& s, const std::string& name, const std::string& origin)
        : origin_(origin), name_(name) {
        const auto it = s.find(name);
        if (it == s.end()) throw ParseError(origin + ": missing section [" + name + "]");
        sec_ = &it->second;
    }

    bool has(const std::string& key) const { return sec_->count(key) > 0; }

    std::string str(const std::string& key) const {
        const auto it = sec_->find(key);
        if (it == sec_->end())
            throw ParseError(origin_ + ": [" + name_ + "] missing key '" + key + "'");
        return it->second;
    }
    std::string str_or(const std::string& key, const std::string& dflt) const {
        return has(key) ? str(key) : dflt;
    }

    double number(const std::string& key) const {
        const std::string v = str(key);
        std::size_t pos = 0;
        double d;
        try {
            d = std::stod(v, &pos);
        } catch (const std::exception&) {
            throw ParseError(origin_ + ": [" + name_ + "] key '" + key + "' is not a number");
        }
        if (trim(v.substr(pos)) != "")
            throw ParseError(origin_ + ": [" + name_ + "] key '" + key + "' has trailing junk");
        return d;
    }
    double number_or(const std::string& key, double dflt) const {
        return has(key) ? number(key) : dflt;
    }

    Vector numbers(const std::string& key, int expect = -1) const {
        std::istringstream in(str(key));
        Vector v;
        double d;
        while (in >> d) v.push_back(d);
        if (!in.eof())
            throw ParseError(origin_ + ": [" + name_ + "] key '" + key + "' has non-numeric parts");
        if (expect >= 0 && static_cast<int>(v.size()) != expect)
            throw ParseError(origin_ + ": [" + name_ + "] key '" + key + "' expects " +
                             std::to_string(expect) + " numbers");
        return v;
    }

    bool flag(const std::string& key, bool dflt) const {
        if (!has(key)) return dflt;
        const std::string v = str(key);
        if (v == "true" || v == "1" || v == "yes") return true;
        if (v == "false" || v == "0" || v == "no") return false;
        throw ParseError(origin_ + ": [" + name_ + "] key '" + key + "' is not a boolean");
    }

private:
    std::string origin_, name_;
    const Section* sec_;
};

}  // namespace

LoadedProblem parse_problem_text(const std::string& text, const std::string& origin) {
    const Sections secs = parse_sections(text, origin);

    const SectionReader dom(secs, "domain", origin);
    const int n = static_cast<int>(dom.number("dim"));
    const bool engineering = dom.flag("engineering", false);
    const std::string kind = dom.str("kind");
    Domain domain = [&] {
        if (kind == "ball") return Domain::ball(dom.numbers("center", n), dom.number("radius"), engineering);
        if (kind == "ellipsoid")
            return Domain::ellipsoid(dom.numbers("center", n), dom.numbers("semi_axes", n), engineering);
        throw ParseError(origin + ": [domain] kind must be 'ball' or 'ellipsoid'");
    }();

    const SectionReader asy(secs, "asymptote", origin);
    QuadraticAsymptote q(asy.numbers("A", n * n), asy.numbers("b", n), asy.number("c"));

    const SectionReader phi(secs, "phi", origin);
    const std::string pform = phi.str("form");
    BoundaryData data = [&] {
        if (pform == "constant") return BoundaryData::constant(phi.number("value"));
        if (pform == "affine") return BoundaryData::affine(phi.numbers("p", n), phi.number("q"));
        if (pform == "quadratic_trace")
            return BoundaryData::quadratic_trace(
                QuadraticAsymptote(phi.numbers("A", n * n), phi.numbers("b", n), phi.number("c")));
        if (pform == "spherical_harmonic")
            return BoundaryData::spherical_harmonic(domain.center(), phi.number_or("a0", 0.0),
                                                    phi.numbers("a", n), phi.numbers("H", n * n));
        throw ParseError(origin + ": [phi] unknown form '" + pform + "'");
    }();

    const SectionReader gs(secs, "g", origin);
    const std::string gform = gs.str_or("form", "one");
    RhsField g = [&] {
        if (gform == "one") return RhsField::one();
        if (gform == "radial_perturb")
            return RhsField::radial_perturb(gs.number("amplitude"), gs.number("beta"),
                                            gs.number_or("floor", 0.5));
        throw ParseError(origin + ": [g] unknown form '" + gform + "'");
    }();

    GridParams gp;
    const SectionReader grid(secs, "grid", origin);
    gp.h = grid.number("h");
    gp.R = grid.number("R");
    gp.width = static_cast<int>(grid.number_or("width", 2));

    return LoadedProblem{ProblemSpec(std::move(domain), std::move(data), std::move(g), std::move(q)),
                         gp};
}

LoadedProblem parse_problem_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open problem file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_problem_text(ss.str(), path);
}

namespace {

void emit_numbers(std::ostringstream& out, const char* key, const Vector& v) {
    out << key << " =";
    char buf[32];
    for (double x : v) {
        std::snprintf(buf, sizeof buf, " %.17g", x);
        out << buf;
    }
    out << "\n";
}

}  // namespace

std::string serialize_problem(const LoadedProblem& p) {
    std::ostringstream out;
    char buf[64];
    const ProblemSpec& s = p.spec;
    const int n = s.dim();

    out << "[domain]\n";
    out << "kind = " << (s.domain.kind() == DomainKind::Ball ? "ball" : "ellipsoid") << "\n";
    out << "dim = " << n << "\n";
    emit_numbers(out, "center", s.domain.center());
    if (s.domain.kind() == DomainKind::Ball) {
        std::snprintf(buf, sizeof buf, "radius = %.17g\n", s.domain.radius());
        out << buf;
    } else {
        // ellipsoids serialize through the shape matrix diagonal when axis
        // aligned; general quadrics are not round-trippable by design
        Vector axes(n);
        for (int i = 0; i < n; ++i) axes[i] = 1.0 / std::sqrt(s.domain.shape()[i * n + i]);
        emit_numbers(out, "semi_axes", axes);
    }
    if (s.domain.engineering_2d()) out << "engineering = true\n";

    out << "\n[phi]\n";
    switch (s.phi.form()) {
        case BoundaryData::Form::Constant:
            std::snprintf(buf, sizeof buf, "form = constant\nvalue = %.17g\n",
                          s.phi.constant_value());
            out << buf;
            break;
        case BoundaryData::Form::Affine:
            out << "form = affine\n";
            emit_numbers(out, "p", s.phi.affine_p());
            std::snprintf(buf, sizeof buf, "q = %.17g\n", s.phi.affine_q());
            out << buf;
            break;
        case BoundaryData::Form::QuadraticTrace:
            out << "form = quadratic_trace\n";
            emit_numbers(out, "A", s.phi.trace()->A);
            emit_numbers(out, "b", s.phi.trace()->b);
            std::snprintf(buf, sizeof buf, "c = %.17g\n", s.phi.trace()->c);
            out << buf;
            break;
        case BoundaryData::Form::SphericalHarmonic:
            out << "form = spherical_harmonic\n";
            std::snprintf(buf, sizeof buf, "a0 = %.17g\n", s.phi.sh_a0());
            out << buf;
            emit_numbers(out, "a", s.phi.sh_a());
            emit_numbers(out, "H", s.phi.sh_h());
            break;
        case BoundaryData::Form::AffineComposed:
            throw InvalidArgument("cannot serialize a normalized (affine-composed) boundary form");
    }

    out << "\n[g]\n";
    if (s.g.is_one()) {
        out << "form = one\n";
    } else {
        std::snprintf(buf, sizeof buf, "form = radial_perturb\namplitude = %.17g\nbeta = %.17g\nfloor = %.17g\n",
                      s.g.amplitude(), s.g.beta(), s.g.floor_gmin());
        out << buf;
    }

    out << "\n[asymptote]\n";
    emit_numbers(out, "A", s.asymptote.A);
    emit_numbers(out, "b", s.asymptote.b);
    std::snprintf(buf, sizeof buf, "c = %.17g\n", s.asymptote.c);
    out << buf;

    out << "\n[grid]\n";
    std::snprintf(buf, sizeof buf, "h = %.17g\nR = %.17g\nwidth = %d\n", p.grid.h, p.grid.R,
                  p.grid.width);
    out << buf;
    return out.str();
}

}  // namespace maext
