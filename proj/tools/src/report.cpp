#include "phonongate/cli/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "phonongate/cli/csv.hpp"
#include "phonongate/errors.hpp"

namespace phonongate::cli {

namespace {

std::string readable(double v, const char* fmt) {
    if (!std::isfinite(v)) return format_number(v);
    char buf[32];
    std::snprintf(buf, sizeof buf, fmt, v);
    return buf;
}

const char* symbol(Relation r) {
    switch (r) {
        case Relation::Below: return "<";
        case Relation::AtMost: return "<=";
        case Relation::Above: return ">";
        case Relation::AtLeast: return ">=";
        case Relation::Holds: return "";
    }
    return "?";
}

}  // namespace

bool Report::add(Check c) {
    const bool ok = c.passed;
    checks_.push_back(std::move(c));
    return ok;
}

// NaN compares false everywhere, so a NaN value always fails.
bool Report::below(std::string name, double value, double bound, std::string detail) {
    return add({std::move(name), value, bound, Relation::Below, value < bound, std::move(detail)});
}

bool Report::at_most(std::string name, double value, double bound, std::string detail) {
    return add({std::move(name), value, bound, Relation::AtMost, value <= bound, std::move(detail)});
}

bool Report::above(std::string name, double value, double bound, std::string detail) {
    return add({std::move(name), value, bound, Relation::Above, value > bound, std::move(detail)});
}

bool Report::at_least(std::string name, double value, double bound, std::string detail) {
    return add({std::move(name), value, bound, Relation::AtLeast, value >= bound, std::move(detail)});
}

bool Report::holds(std::string name, bool ok, std::string detail) {
    return add({std::move(name), ok ? 1.0 : 0.0, 1.0, Relation::Holds, ok, std::move(detail)});
}

void Report::warn(std::string message) { warnings_.push_back(std::move(message)); }
void Report::note(std::string message) { notes_.push_back(std::move(message)); }
void Report::artifact(std::string file) { artifacts_.push_back(std::move(file)); }

const Check* Report::find(std::string_view name) const {
    const auto it = std::find_if(checks_.begin(), checks_.end(), [&](const Check& c) { return c.name == name; });
    return it == checks_.end() ? nullptr : &*it;
}

bool Report::passed(bool strict) const {
    if (checks_.empty()) return false;
    if (strict && !warnings_.empty()) return false;
    return std::all_of(checks_.begin(), checks_.end(), [](const Check& c) { return c.passed; });
}

std::string Report::render(bool strict) const {
    std::ostringstream os;
    os << "scenario: " << scenario_ << '\n';
    os << "checks: " << checks_.size() << '\n';
    for (const auto& c : checks_) {
        os << "  [" << (c.passed ? "PASS" : "FAIL") << "] " << c.name;
        if (c.relation == Relation::Holds) {
            os << (c.passed ? " holds" : " violated");
        } else {
            os << " = " << readable(c.value, "%.8g") << ' ' << symbol(c.relation) << ' ' << readable(c.bound, "%g");
        }
        if (!c.detail.empty()) os << "  (" << c.detail << ')';
        os << '\n';
    }
    if (!warnings_.empty()) {
        os << "warnings: " << warnings_.size() << (strict ? " (strict: counted as failures)" : "") << '\n';
        for (const auto& w : warnings_) os << "  - " << w << '\n';
    }
    if (!notes_.empty()) {
        os << "notes:\n";
        for (const auto& n : notes_) os << "  - " << n << '\n';
    }
    if (!artifacts_.empty()) {
        os << "artifacts:\n";
        for (const auto& a : artifacts_) os << "  - " << a << '\n';
    }
    if (checks_.empty()) os << "error: scenario registered no checks\n";
    os << "result: " << (passed(strict) ? "PASS" : "FAIL") << '\n';
    return os.str();
}

void Report::write(const std::filesystem::path& path, bool strict) const {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write report '" + path.string() + "'");
    out << render(strict);
}

}  // namespace phonongate::cli
