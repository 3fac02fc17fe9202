#pragma once

#include <string>
#include <vector>

#include "pedcross/domain.hpp"

namespace pedcross::testing {

// A well-formed crossing trial with every field populated; tests tweak the
// fields they care about.
inline Trial make_trial(const std::string& pair = "pair_01") {
    Trial t;
    t.pair_id = pair;
    t.driver = {pair + "_d", Role::driver, 31, Gender::male, 53.17, 53.78};
    t.pedestrian = {pair + "_p", Role::pedestrian, 25, Gender::female, 53.67, 50.47};
    t.tta = 5.0;
    t.waiting_time = 52.71;
    t.location = Location::zebra;
    t.outcome.decision = 1;
    t.outcome.cit = 1.2;
    t.outcome.cd = 3.1;
    return t;
}

inline Trial make_waiting_trial(const std::string& pair = "pair_01") {
    Trial t = make_trial(pair);
    t.outcome.decision = 0;
    t.outcome.cit.reset();
    t.outcome.cd.reset();
    return t;
}

// Small deterministic set spanning both locations, both genders, and both
// outcomes; enough variety for encoders and CV plumbing.
inline std::vector<Trial> small_dataset(std::size_t n = 40) {
    std::vector<Trial> trials;
    for (std::size_t i = 0; i < n; ++i) {
        Trial t = make_trial("pair_" + std::string(1, char('a' + i % 4)));
        t.tta = 3.0 + double(i % 5);
        t.waiting_time = 20.0 + double(i * 7 % 60);
        t.location = (i % 2 == 0) ? Location::zebra : Location::non_zebra;
        t.driver.gender = (i % 3 == 0) ? Gender::female : Gender::male;
        t.pedestrian.gender = (i % 4 == 0) ? Gender::male : Gender::female;
        t.driver.age = 24 + int(i * 3 % 30);
        t.pedestrian.age = 19 + int(i * 5 % 24);
        t.driver.svo = 45.0 + double(i % 13);
        t.pedestrian.svo = 50.0 + double(i % 7);
        t.driver.aiss = 44.0 + double(i % 17);
        t.pedestrian.aiss = 40.0 + double(i % 11);
        if (t.tta >= 5.0) {
            t.outcome.decision = 1;
            t.outcome.cit = 0.8 + 0.05 * double(i % 9);
            t.outcome.cd = 2.0 + 0.1 * double(i % 6);
        } else {
            t.outcome.decision = 0;
            t.outcome.cit.reset();
            t.outcome.cd.reset();
        }
        trials.push_back(t);
    }
    return trials;
}

}  // namespace pedcross::testing
