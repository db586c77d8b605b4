#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace phonongate::cli {

enum class Relation { Below, AtMost, Above, AtLeast, Holds };

struct Check {
    std::string name;
    double value = 0.0;
    double bound = 0.0;
    Relation relation = Relation::Holds;
    bool passed = false;
    std::string detail;
};

/// Tolerance checks, warnings and artifacts of one scenario run.
class Report {
public:
    explicit Report(std::string scenario) : scenario_(std::move(scenario)) {}

    bool below(std::string name, double value, double bound, std::string detail = {});
    bool at_most(std::string name, double value, double bound, std::string detail = {});
    bool above(std::string name, double value, double bound, std::string detail = {});
    bool at_least(std::string name, double value, double bound, std::string detail = {});
    bool holds(std::string name, bool ok, std::string detail = {});

    void warn(std::string message);
    void note(std::string message);
    void artifact(std::string file);

    const std::string& scenario() const noexcept { return scenario_; }
    const std::vector<Check>& checks() const noexcept { return checks_; }
    const std::vector<std::string>& warnings() const noexcept { return warnings_; }
    const std::vector<std::string>& notes() const noexcept { return notes_; }
    const Check* find(std::string_view name) const;

    /// All checks pass, at least one check ran, and under `strict` no warnings.
    bool passed(bool strict = false) const;

    std::string render(bool strict = false) const;
    void write(const std::filesystem::path& path, bool strict = false) const;

private:
    bool add(Check c);

    std::string scenario_;
    std::vector<Check> checks_;
    std::vector<std::string> warnings_;
    std::vector<std::string> notes_;
    std::vector<std::string> artifacts_;
};

}  // namespace phonongate::cli
