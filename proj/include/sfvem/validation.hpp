#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace sfvem {

/// Result of one named check. `locus` names the first offending entity when it fails.
struct CheckResult
{
    std::string name;
    bool passed = true;
    std::string locus;
};

struct ValidationReport
{
    std::vector<CheckResult> checks;

    void add(std::string name, bool passed, std::string locus = {})
    {
        checks.push_back({std::move(name), passed, std::move(locus)});
    }

    void merge(const ValidationReport& other, const std::string& prefix = {})
    {
        for (const auto& c : other.checks) {
            checks.push_back({prefix + c.name, c.passed, c.locus});
        }
    }

    bool ok() const
    {
        for (const auto& c : checks) {
            if (!c.passed) {
                return false;
            }
        }
        return true;
    }

    /// First failing check with the given name, or nullptr.
    const CheckResult* failure(const std::string& name) const
    {
        for (const auto& c : checks) {
            if (!c.passed && c.name == name) {
                return &c;
            }
        }
        return nullptr;
    }
};

inline std::ostream& operator<<(std::ostream& os, const ValidationReport& report)
{
    for (const auto& c : report.checks) {
        os << (c.passed ? "PASS " : "FAIL ") << c.name;
        if (!c.passed && !c.locus.empty()) {
            os << " [" << c.locus << "]";
        }
        os << '\n';
    }
    return os;
}

} // namespace sfvem
