/*
    Licensed under the Apache License, Version 2.0 (the "License");
    you may not use this file except in compliance with the License.
    You may obtain a copy of the License at

        https://www.apache.org/licenses/LICENSE-2.0

    Unless required by applicable law or agreed to in writing, software
    distributed under the License is distributed on an "AS IS" BASIS,
    WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
    See the License for the specific language governing permissions and
    limitations under the License.
*/

// End-to-end acceptance suite. Each criterion prints exactly one PASS/FAIL
// line; the process exits nonzero if any criterion fails.

#include <chrono>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "generators.hpp"
#include "matrix.hpp"
#include "testutil.hpp"
#include "vsync/esql/parser.hpp"
#include "vsync/esql/printer.hpp"
#include "vsync/kb_io.hpp"
#include "vsync/oracle.hpp"
#include "vsync/report.hpp"
#include "vsync/sync.hpp"

using namespace vsync;

namespace {

struct Criterion {
    std::string name;
    std::function<std::string()> run; // empty string = pass, otherwise reason
};

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::string check(bool ok, const std::string& reason) { return ok ? "" : reason; }

esql::ViewDefinition golden(const char* name) {
    return esql::parse_view(testutil::read_file(testutil::fixture_path(name)));
}

// Doctor-name deletion must reproduce the published rewrite: the untouched
// IdD column, the substituted Name column on a fresh alias of the second
// source's Doctor relation, and the key-equating join.
std::string golden_attribute_substitution() {
    auto start = std::chrono::steady_clock::now();
    auto loaded = testutil::load_healthcare();
    sync::SyncReport report =
        sync::synchronize(loaded.mkb, loaded.vkb, DeleteAttribute{{"S1", "Doctor", "Name"}});
    if (report.per_view.size() != 1 || !report.per_view.count("V1"))
        return "expected exactly V1 to be affected";
    const auto* rewritten = std::get_if<sync::Rewritten>(&report.per_view.at("V1"));
    if (!rewritten) return "V1 was not rewritten";
    if (!(rewritten->view == golden("golden_v1_rewrite.esql")))
        return "rewritten V1 does not match the golden definition";
    if (seconds_since(start) >= 1.0) return "took longer than 1 s";
    return "";
}

std::string golden_relation_substitution() {
    auto start = std::chrono::steady_clock::now();
    auto loaded = testutil::load_healthcare();
    sync::SyncReport report =
        sync::synchronize(loaded.mkb, loaded.vkb, DeleteRelation{{"S1", "Hospital"}});
    const auto* rewritten = std::get_if<sync::Rewritten>(&report.per_view.at("V2"));
    if (!rewritten) return "V2 was not rewritten";
    if (!(rewritten->view == golden("golden_v2_rewrite.esql")))
        return "rewritten V2 does not match the golden definition";
    if (rewritten->extent != ExtentRelation::Subset) return "extent is not subset";
    if (!sync::ve_compatible(ExtentRelation::Subset, rewritten->extent))
        return "subset extent not accepted by the view's VE";
    if (seconds_since(start) >= 1.0) return "took longer than 1 s";
    return "";
}

std::string failure_exactness() {
    const std::string expected = "Web service can't be synchronized";
    auto loaded = testutil::load_healthcare();
    loaded.mkb.apply_event(DeleteRelation{{"S1", "Hospital"}});
    // (XD=false, XR=false)
    auto frozen = esql::parse_view("CREATE VIEW T AS SELECT H.Name FROM S1.Hospital H;");
    auto outcome = sync::rewrite_view_for_relation(loaded.mkb, frozen, {"S1", "Hospital"});
    const auto* failed = std::get_if<sync::Failed>(&outcome);
    if (!failed) return "frozen relation did not fail";
    if (failed->message != expected) return "message mismatch: \"" + failed->message + "\"";
    // (XD=false, XR=true) with no candidate
    auto fresh = testutil::load_healthcare();
    fresh.mkb.apply_event(DeleteAttribute{{"S1", "Patient", "Tel"}});
    auto no_candidate = esql::parse_view(
        "CREATE VIEW T AS SELECT P.Tel (AD=false, AR=true) FROM S1.Patient P;");
    auto outcome2 =
        sync::rewrite_view_for_attribute(fresh.mkb, no_candidate, {"S1", "Patient", "Tel"});
    const auto* failed2 = std::get_if<sync::Failed>(&outcome2);
    if (!failed2) return "candidate-less attribute did not fail";
    if (failed2->message != expected) return "message mismatch: \"" + failed2->message + "\"";
    return "";
}

std::string branch_matrix() {
    auto rows = testutil::run_branch_matrix();
    if (rows.size() != 16) return "expected 16 rows";
    int passed = 0;
    std::string first_failure;
    for (const auto& row : rows) {
        if (row.pass) {
            ++passed;
        } else if (first_failure.empty()) {
            first_failure = std::string(row.relation_kind ? "relation" : "attribute") +
                            " XD=" + (row.dispensable ? "t" : "f") +
                            " XR=" + (row.replaceable ? "t" : "f") +
                            " cand=" + (row.candidate ? "t" : "f") + ": expected " +
                            row.expected + ", got " + row.actual;
        }
    }
    return check(passed == 16,
                 std::to_string(passed) + "/16 branch outcomes correct; first failure: " +
                     first_failure);
}

std::string parser_round_trip() {
    testutil::ViewGenerator generator(97);
    for (int i = 0; i < 1000; ++i) {
        esql::ViewDefinition view = generator.next();
        std::string text = esql::print_view(view);
        esql::ViewDefinition reparsed;
        try {
            reparsed = esql::parse_view(text);
        } catch (const Error& e) {
            return "trial " + std::to_string(i) + ": parse failed: " + e.what();
        }
        if (!(reparsed == view)) return "trial " + std::to_string(i) + ": AST mismatch";
    }
    return "";
}

// Shared across the oracle-agreement and VE-safety criteria.
struct FuzzStats {
    int trials = 0;
    int member_failures = 0;
    int ranking_failures = 0;
    int ve_violations = 0;
    double elapsed = 0;
    std::uint64_t first_bad_seed = 0;
    bool ran = false;
};

FuzzStats& fuzz_stats() {
    static FuzzStats stats;
    if (stats.ran) return stats;
    stats.ran = true;
    auto start = std::chrono::steady_clock::now();
    const std::uint64_t base = 10000;
    const int trials = 1000;
    for (int t = 0; t < trials; ++t) {
        const std::uint64_t seed = base + static_cast<std::uint64_t>(t);
        oracle::Instance instance = oracle::generate_instance(seed);
        wsmkb::Store mkb = instance.mkb;
        wsvkb::Store vkb = instance.vkb;
        sync::SyncReport report = sync::synchronize(mkb, vkb, instance.event);
        ++stats.trials;
        for (const auto& [view_id, outcome] : report.per_view) {
            const auto& original = instance.vkb.view(view_id).definition;
            oracle::OutcomeSet expected =
                oracle::enumerate_outcomes(instance.mkb, original, instance.event);
            bool member = false;
            for (const auto& candidate : expected.outcomes)
                if (candidate == outcome) member = true;
            if (!member) {
                if (!stats.member_failures) stats.first_bad_seed = seed;
                ++stats.member_failures;
            } else if (!(outcome == expected.outcomes[expected.best])) {
                if (!stats.ranking_failures) stats.first_bad_seed = seed;
                ++stats.ranking_failures;
            }
            if (const auto* rewritten = std::get_if<sync::Rewritten>(&outcome))
                if (!sync::ve_compatible(original.ve, rewritten->extent)) ++stats.ve_violations;
        }
    }
    stats.elapsed = seconds_since(start);
    return stats;
}

std::string oracle_agreement() {
    const FuzzStats& stats = fuzz_stats();
    if (stats.member_failures)
        return std::to_string(stats.member_failures) +
               " outcomes outside the oracle set (first seed " +
               std::to_string(stats.first_bad_seed) + ")";
    if (stats.ranking_failures)
        return std::to_string(stats.ranking_failures) +
               " outcomes not ranking-maximal (first seed " +
               std::to_string(stats.first_bad_seed) + ")";
    if (stats.trials < 1000) return "ran only " + std::to_string(stats.trials) + " trials";
    if (stats.elapsed >= 60.0) return "took longer than 60 s";
    return "";
}

std::string ve_safety() {
    const FuzzStats& stats = fuzz_stats();
    return check(stats.ve_violations == 0,
                 std::to_string(stats.ve_violations) + " rewrites violated their view's VE");
}

std::string determinism() {
    // the same fuzz seeds, replayed, must render byte-identical reports
    for (std::uint64_t seed : {10007ull, 10400ull, 10999ull}) {
        std::string first, second;
        for (std::string* target : {&first, &second}) {
            oracle::Instance instance = oracle::generate_instance(seed);
            sync::SyncReport report =
                sync::synchronize(instance.mkb, instance.vkb, instance.event);
            *target = report::render_text(report) + report::render_json(report);
        }
        if (first != second) return "fuzz seed " + std::to_string(seed) + " diverged";
    }
    // and so must the golden runs
    for (int round = 0; round < 2; ++round) {
        std::string first, second;
        for (std::string* target : {&first, &second}) {
            auto loaded = testutil::load_healthcare();
            ChangeEvent event =
                round == 0 ? ChangeEvent(DeleteAttribute{{"S1", "Doctor", "Name"}})
                           : ChangeEvent(DeleteRelation{{"S1", "Hospital"}});
            sync::SyncReport report = sync::synchronize(loaded.mkb, loaded.vkb, event);
            *target = report::render_text(report) + report::render_json(report);
        }
        if (first != second) return "golden run diverged";
    }
    return "";
}

} // namespace

int main() {
    std::vector<Criterion> criteria = {
        {"golden-attribute-substitution", golden_attribute_substitution},
        {"golden-relation-substitution", golden_relation_substitution},
        {"failure-message-exactness", failure_exactness},
        {"branch-matrix-16", branch_matrix},
        {"parser-round-trip-1000", parser_round_trip},
        {"oracle-agreement-1000", oracle_agreement},
        {"ve-safety", ve_safety},
        {"determinism", determinism},
    };
    int failures = 0;
    for (const auto& criterion : criteria) {
        std::string reason;
        try {
            reason = criterion.run();
        } catch (const std::exception& e) {
            reason = std::string("exception: ") + e.what();
        }
        if (reason.empty()) {
            std::printf("PASS %s\n", criterion.name.c_str());
        } else {
            std::printf("FAIL %s: %s\n", criterion.name.c_str(), reason.c_str());
            ++failures;
        }
    }
    return failures;
}
