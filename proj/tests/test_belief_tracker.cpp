#include <doctest.h>

#include <cmath>
#include <vector>

#include "crowdnav/belief_tracker.hpp"
#include "crowdnav/rng.hpp"

using namespace crowdnav;

namespace {

const std::vector<Vec2> kCorners{{0.0, 0.0}, {100.0, 0.0}, {0.0, 100.0}, {100.0, 100.0}};

/// Independent single-pedestrian Bayes step, written against the likelihood
/// definition rather than the tracker code: posterior_g = prior_g *
/// exp(kappa * cos phi_g) normalized, then floored and renormalized.
std::vector<double> oracle_update(const std::vector<double>& prior, const Vec2& prev,
                                  const Vec2& next, double speed, double dt,
                                  const std::vector<Vec2>& goals, const BeliefParams& bp) {
    std::vector<double> post = prior;
    const Vec2 disp = next - prev;
    const double moved = std::sqrt(disp.x * disp.x + disp.y * disp.y);
    if (moved >= 0.05 * speed * dt) {
        double z = 0.0;
        for (size_t g = 0; g < goals.size(); ++g) {
            const Vec2 dir = goals[g] - prev;
            const double len = std::sqrt(dir.x * dir.x + dir.y * dir.y);
            const double cos_phi =
                len < 1e-12 ? 1.0 : (disp.x * dir.x + disp.y * dir.y) / (moved * len);
            post[g] = prior[g] * std::exp(bp.kappa * cos_phi);
            z += post[g];
        }
        for (double& v : post) v /= z;
    }
    bool floored = false;
    for (double& v : post)
        if (v < bp.floor_eps) {
            v = bp.floor_eps;
            floored = true;
        }
    if (floored) {
        double z = 0.0;
        for (double v : post) z += v;
        for (double& v : post) v /= z;
    }
    return post;
}

double row_sum(const std::vector<double>& row) {
    double s = 0.0;
    for (double v : row) s += v;
    return s;
}

IntentionBelief one_ped_update(const IntentionBelief& b, const Vec2& prev, const Vec2& next,
                               const BeliefParams& bp) {
    const std::vector<Vec2> prevs{prev};
    const std::vector<Vec2> nexts{next};
    const std::vector<double> speeds{1.0};
    return update_belief(b, prevs, nexts, speeds, 0.5, kCorners, bp);
}

}  // namespace

TEST_CASE("a straight step toward a goal raises its probability above uniform") {
    IntentionBelief b = IntentionBelief::uniform(1, 4);
    const Vec2 prev{50.0, 50.0};
    const Vec2 toward_g0 = prev + Vec2{-0.35, -0.35};  // straight at corner (0, 0)
    const BeliefParams bp;
    const IntentionBelief updated =
        one_ped_update(b, prev, toward_g0, bp);
    const auto& row = updated.rows[0];
    CHECK(row[0] > 0.25);
    for (int g = 1; g < 4; ++g) CHECK(row[0] > row[g]);
    CHECK(row_sum(row) == doctest::Approx(1.0).epsilon(1e-9));

    // Matches the hand-computed Bayes update.
    const auto expected = oracle_update({0.25, 0.25, 0.25, 0.25}, prev, toward_g0, 1.0, 0.5,
                                        kCorners, bp);
    for (int g = 0; g < 4; ++g) CHECK(row[g] == doctest::Approx(expected[g]).epsilon(1e-12));
}

TEST_CASE("motion bisecting two goals keeps their posteriors equal") {
    IntentionBelief b;
    b.rows.push_back({0.5, 0.5, 0.0, 0.0});
    // Corners (0,0) and (100,0) seen from midfield: straight down bisects them.
    const Vec2 prev{50.0, 50.0};
    const Vec2 next{50.0, 49.5};
    const IntentionBelief updated =
        one_ped_update(b, prev, next, BeliefParams{});
    CHECK(updated.rows[0][0] == doctest::Approx(updated.rows[0][1]).epsilon(1e-12));
}

TEST_CASE("five straight steps keep the walked-at goal nondecreasing") {
    IntentionBelief b = IntentionBelief::uniform(1, 4);
    Vec2 pos{50.0, 50.0};
    const BeliefParams bp;
    std::vector<double> oracle_row{0.25, 0.25, 0.25, 0.25};
    double last = 0.25;
    for (int step = 0; step < 5; ++step) {
        const Vec2 dir = kCorners[3] - pos;
        const double len = std::sqrt(dir.x * dir.x + dir.y * dir.y);
        const Vec2 next = pos + dir * (0.5 / len);
        b = one_ped_update(b, pos, next, bp);
        oracle_row = oracle_update(oracle_row, pos, next, 1.0, 0.5, kCorners, bp);
        CHECK(b.rows[0][3] >= last - 1e-12);
        CHECK(b.rows[0][3] == doctest::Approx(oracle_row[3]).epsilon(1e-12));
        last = b.rows[0][3];
        pos = next;
    }
    CHECK(b.rows[0][3] > 0.5);
}

TEST_CASE("randomized single-step updates match the exhaustive Bayes oracle") {
    Rng rng(1234);
    const BeliefParams bp;
    int checked = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        std::vector<double> prior(4);
        double z = 0.0;
        for (double& v : prior) {
            v = rng.uniform(0.01, 1.0);
            z += v;
        }
        for (double& v : prior) v /= z;

        const Vec2 prev{rng.uniform(1.0, 99.0), rng.uniform(1.0, 99.0)};
        const double angle = rng.uniform(-kPi, kPi);
        const double moved = rng.uniform(0.0, 0.8);
        const Vec2 next = prev + unit_from_angle(angle) * moved;

        IntentionBelief b;
        b.rows.push_back(prior);
        const IntentionBelief updated =
            one_ped_update(b, prev, next, bp);
        const auto expected = oracle_update(prior, prev, next, 1.0, 0.5, kCorners, bp);
        for (int g = 0; g < 4; ++g)
            CHECK(std::abs(updated.rows[0][g] - expected[g]) <= 1e-9);
        CHECK(std::abs(row_sum(updated.rows[0]) - 1.0) <= 1e-9);
        ++checked;
    }
    CHECK(checked == 1000);
}

TEST_CASE("a straight-walking pedestrian is identified within 15 steps") {
    IntentionBelief b = IntentionBelief::uniform(1, 4);
    Vec2 pos{50.0, 50.0};
    const BeliefParams bp;
    int steps_needed = -1;
    for (int step = 1; step <= 15; ++step) {
        const Vec2 dir = kCorners[1] - pos;
        const double len = std::sqrt(dir.x * dir.x + dir.y * dir.y);
        const Vec2 next = pos + dir * (0.5 / len);
        b = one_ped_update(b, pos, next, bp);
        pos = next;
        if (b.rows[0][1] >= 0.9) {
            steps_needed = step;
            break;
        }
    }
    CHECK(steps_needed > 0);
}

TEST_CASE("posterior ranking is invariant to prior rescaling") {
    // eta absorbs any positive scale on the unnormalized weights.
    std::vector<double> prior{0.4, 0.3, 0.2, 0.1};
    IntentionBelief a;
    a.rows.push_back(prior);
    IntentionBelief scaled;
    scaled.rows.push_back({0.8, 0.6, 0.4, 0.2});  // same ratios, unnormalized

    const Vec2 prev{40.0, 60.0};
    const Vec2 next{40.3, 59.8};
    const BeliefParams bp;
    const auto ua = one_ped_update(a, prev, next, bp);
    const auto ub = one_ped_update(scaled, prev, next, bp);
    for (int g = 0; g < 4; ++g)
        CHECK(ua.rows[0][g] == doctest::Approx(ub.rows[0][g]).epsilon(1e-12));
}

TEST_CASE("degenerate belief pins every sampled goal") {
    IntentionBelief b;
    b.rows.push_back({1.0, 0.0, 0.0, 0.0});
    POMDPState observed;
    observed.vehicle = {{10.0, 10.0}, 0.0, 0.0, {90.0, 90.0}};
    observed.pedestrians.push_back({{50.0, 50.0}, 1.0, kCorners[2]});
    const auto particles = sample_scenarios(b, observed, kCorners, 64, 99);
    REQUIRE(particles.size() == 64);
    for (const auto& p : particles) CHECK(p.state.pedestrians[0].goal == kCorners[0]);
}

TEST_CASE("uniform belief sampling matches its frequencies") {
    IntentionBelief b = IntentionBelief::uniform(1, 4);
    POMDPState observed;
    observed.vehicle = {{10.0, 10.0}, 0.0, 0.0, {90.0, 90.0}};
    observed.pedestrians.push_back({{50.0, 50.0}, 1.0, kCorners[0]});
    const int k = 10000;
    const auto particles = sample_scenarios(b, observed, kCorners, k, 7);
    std::vector<int> counts(4, 0);
    for (const auto& p : particles)
        for (int g = 0; g < 4; ++g)
            if (p.state.pedestrians[0].goal == kCorners[g]) ++counts[g];
    for (int g = 0; g < 4; ++g)
        CHECK(std::abs(counts[g] / static_cast<double>(k) - 0.25) <= 0.02);
}

TEST_CASE("scenario sampling is deterministic per seed") {
    IntentionBelief b = IntentionBelief::uniform(3, 4);
    POMDPState observed;
    observed.vehicle = {{10.0, 10.0}, 0.0, 0.0, {90.0, 90.0}};
    for (int i = 0; i < 3; ++i)
        observed.pedestrians.push_back({{30.0 + i, 40.0}, 1.0, kCorners[0]});
    const auto a = sample_scenarios(b, observed, kCorners, 50, 1717);
    const auto c = sample_scenarios(b, observed, kCorners, 50, 1717);
    REQUIRE(a.size() == c.size());
    for (size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].seed == c[i].seed);
        for (size_t j = 0; j < a[i].state.pedestrians.size(); ++j)
            CHECK(a[i].state.pedestrians[j].goal == c[i].state.pedestrians[j].goal);
    }
}

TEST_CASE("population changes preserve row structure") {
    IntentionBelief b = IntentionBelief::uniform(3, 4);
    b.rows[1] = {0.7, 0.1, 0.1, 0.1};

    const IntentionBelief swapped = handle_population_change(b, {0}, 1);
    REQUIRE(swapped.rows.size() == 3);
    CHECK(swapped.rows[0] == std::vector<double>{0.7, 0.1, 0.1, 0.1});
    CHECK(swapped.rows[2] == std::vector<double>{0.25, 0.25, 0.25, 0.25});

    const IntentionBelief same = handle_population_change(b, {}, 0);
    CHECK(same.rows == b.rows);

    const IntentionBelief fresh = handle_population_change(b, {0, 1, 2}, 3);
    REQUIRE(fresh.rows.size() == 3);
    for (const auto& row : fresh.rows) CHECK(row == std::vector<double>{0.25, 0.25, 0.25, 0.25});
}

TEST_CASE("rows stay normalized through every operation") {
    Rng rng(5);
    IntentionBelief b = IntentionBelief::uniform(4, 4);
    std::vector<Vec2> prev(4), next(4);
    std::vector<double> speeds(4, 1.0);
    for (int step = 0; step < 50; ++step) {
        for (int i = 0; i < 4; ++i) {
            prev[i] = {rng.uniform(0.0, 100.0), rng.uniform(0.0, 100.0)};
            next[i] = prev[i] + unit_from_angle(rng.uniform(-kPi, kPi)) * rng.uniform(0.0, 0.6);
        }
        b = update_belief(b, prev, next, speeds, 0.5, kCorners, BeliefParams{});
        for (const auto& row : b.rows) CHECK(std::abs(row_sum(row) - 1.0) <= 1e-9);
    }
}
