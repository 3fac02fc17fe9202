#include "pedcross/domain.hpp"

#include <cmath>

#include "pedcross/errors.hpp"

namespace pedcross {

std::string to_string(Role r) {
    return r == Role::driver ? "driver" : "pedestrian";
}

std::string to_string(Gender g) {
    return g == Gender::female ? "F" : "M";
}

std::string to_string(Location l) {
    return l == Location::zebra ? "zebra" : "non_zebra";
}

namespace {

void validate_participant(const Participant& p, const std::string& who,
                          Role expected_role, std::vector<std::string>& out) {
    if (p.role != expected_role) {
        out.push_back(who + " must have role " + to_string(expected_role));
    }
    if (p.age < 18 || p.age > 100) {
        out.push_back(who + " age must be in [18, 100]");
    }
    if (!std::isfinite(p.svo)) {
        out.push_back(who + " svo must be finite");
    }
    if (!std::isfinite(p.aiss)) {
        out.push_back(who + " aiss must be finite");
    }
}

void check_positive_finite(const std::optional<double>& v, const std::string& name,
                           std::vector<std::string>& out) {
    if (v && (!std::isfinite(*v) || *v <= 0.0)) {
        out.push_back(name + " must be positive and finite");
    }
}

}  // namespace

std::vector<std::string> validate_trial(const Trial& trial) {
    std::vector<std::string> violations;

    validate_participant(trial.driver, "driver", Role::driver, violations);
    validate_participant(trial.pedestrian, "pedestrian", Role::pedestrian, violations);

    if (!std::isfinite(trial.tta) || trial.tta <= 0.0) {
        violations.push_back("tta must be positive");
    }
    if (!std::isfinite(trial.waiting_time) || trial.waiting_time <= 0.0) {
        violations.push_back("waiting_time must be positive");
    }

    const Outcome& o = trial.outcome;
    if (o.decision != 0 && o.decision != 1) {
        violations.push_back("decision must be 0 or 1");
    }
    if (o.decision == 0) {
        if (o.cit) violations.push_back("cit present for waiting trial");
        if (o.cd) violations.push_back("cd present for waiting trial");
    } else if (o.decision == 1) {
        if (!o.cit) violations.push_back("cit missing for crossing trial");
        if (!o.cd) violations.push_back("cd missing for crossing trial");
    }
    check_positive_finite(o.cit, "cit", violations);
    check_positive_finite(o.cd, "cd", violations);

    return violations;
}

DeltaFeatures derive_delta_features(const Trial& trial) {
    return DeltaFeatures{
        trial.pedestrian.svo - trial.driver.svo,
        trial.pedestrian.aiss - trial.driver.aiss,
    };
}

std::string to_string(FeatureId f) {
    switch (f) {
        case FeatureId::Ta: return "T_a";
        case FeatureId::Tw: return "T_w";
        case FeatureId::L: return "L";
        case FeatureId::Ad: return "A_d";
        case FeatureId::Ap: return "A_p";
        case FeatureId::Gd: return "G_d";
        case FeatureId::Gp: return "G_p";
        case FeatureId::SvoD: return "SVO_d";
        case FeatureId::SvoP: return "SVO_p";
        case FeatureId::AissD: return "AISS_d";
        case FeatureId::AissP: return "AISS_p";
        case FeatureId::DSvo: return "dSVO";
        case FeatureId::DAiss: return "dAISS";
        case FeatureId::PairId: return "pair_id";
    }
    return "?";
}

std::optional<FeatureId> feature_from_string(const std::string& s) {
    static const std::pair<const char*, FeatureId> table[] = {
        {"T_a", FeatureId::Ta},       {"T_w", FeatureId::Tw},
        {"L", FeatureId::L},          {"A_d", FeatureId::Ad},
        {"A_p", FeatureId::Ap},       {"G_d", FeatureId::Gd},
        {"G_p", FeatureId::Gp},       {"SVO_d", FeatureId::SvoD},
        {"SVO_p", FeatureId::SvoP},   {"AISS_d", FeatureId::AissD},
        {"AISS_p", FeatureId::AissP}, {"dSVO", FeatureId::DSvo},
        {"dAISS", FeatureId::DAiss},  {"pair_id", FeatureId::PairId},
    };
    for (const auto& [name, id] : table) {
        if (s == name) return id;
    }
    return std::nullopt;
}

std::string to_string(FeatureSetName n) {
    switch (n) {
        case FeatureSetName::baseline: return "baseline";
        case FeatureSetName::ours: return "ours";
        case FeatureSetName::ours_delta: return "ours_delta";
        case FeatureSetName::subset1: return "subset1";
        case FeatureSetName::subset2: return "subset2";
        case FeatureSetName::subset3: return "subset3";
        case FeatureSetName::subset4: return "subset4";
    }
    return "?";
}

std::optional<FeatureSetName> feature_set_from_string(const std::string& s) {
    static const std::pair<const char*, FeatureSetName> table[] = {
        {"baseline", FeatureSetName::baseline},
        {"ours", FeatureSetName::ours},
        {"ours_delta", FeatureSetName::ours_delta},
        {"subset1", FeatureSetName::subset1},
        {"subset2", FeatureSetName::subset2},
        {"subset3", FeatureSetName::subset3},
        {"subset4", FeatureSetName::subset4},
    };
    for (const auto& [name, id] : table) {
        if (s == name) return id;
    }
    return std::nullopt;
}

FeatureSetSpec FeatureSetSpec::make(FeatureSetName name) {
    using F = FeatureId;
    switch (name) {
        case FeatureSetName::baseline:
            return {name, {F::Ta, F::Tw, F::L, F::Ap, F::Gp, F::DSvo, F::DAiss, F::PairId}};
        case FeatureSetName::ours:
            return {name, {F::Ta, F::Tw, F::L, F::Ad, F::Ap, F::Gd, F::Gp,
                           F::SvoD, F::SvoP, F::AissD, F::AissP}};
        case FeatureSetName::ours_delta:
            return {name, {F::Ta, F::Tw, F::L, F::Ad, F::Ap, F::Gd, F::Gp,
                           F::SvoD, F::SvoP, F::AissD, F::AissP, F::DSvo, F::DAiss}};
        case FeatureSetName::subset1:
            return {name, {F::Ta, F::Tw, F::L, F::Ad, F::Ap, F::Gd, F::Gp}};
        case FeatureSetName::subset2:
            return {name, {F::Ta, F::Tw, F::L, F::Ad, F::Gd}};
        case FeatureSetName::subset3:
            return {name, {F::Ta, F::Tw, F::L, F::Ap, F::Gp}};
        case FeatureSetName::subset4:
            return {name, {F::Ta, F::Tw, F::L}};
    }
    throw ConfigError("unknown feature set");
}

FeatureSetSpec FeatureSetSpec::parse(const std::string& name) {
    const auto n = feature_set_from_string(name);
    if (!n) throw ConfigError("unknown feature set: " + name);
    return make(*n);
}

}  // namespace pedcross
