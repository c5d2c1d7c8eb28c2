#pragma once

#include "askgen/error.hpp"

#include <array>
#include <initializer_list>
#include <string>
#include <vector>

namespace askgen {

inline constexpr int first_rule = 1;
inline constexpr int last_rule = 10;

/// On/off switch per normalization rule 1..10.
class RuleToggles {
public:
    RuleToggles() = default;

    RuleToggles(std::initializer_list<int> ids) {
        for (int id : ids) set(id, true);
    }

    static RuleToggles from_ids(const std::vector<int>& ids) {
        RuleToggles t;
        for (int id : ids) t.set(id, true);
        return t;
    }

    static RuleToggles all() {
        RuleToggles t;
        t.on_.fill(true);
        return t;
    }

    bool enabled(int id) const { return on_.at(index(id)); }
    void set(int id, bool value) { on_.at(index(id)) = value; }

    std::vector<int> ids() const {
        std::vector<int> out;
        for (int id = first_rule; id <= last_rule; ++id)
            if (enabled(id)) out.push_back(id);
        return out;
    }

    friend bool operator==(const RuleToggles&, const RuleToggles&) = default;

private:
    static std::size_t index(int id) {
        if (id < first_rule || id > last_rule)
            fail(ErrorKind::invalid_argument, "rule id " + std::to_string(id) + " outside 1..10");
        return static_cast<std::size_t>(id - first_rule);
    }

    std::array<bool, last_rule> on_{};
};

/// Rules applied by default on top of a preset's per-type list (the "commonly applied" ones).
inline RuleToggles common_rules() { return {2, 5, 6, 7, 8, 10}; }

}  // namespace askgen
