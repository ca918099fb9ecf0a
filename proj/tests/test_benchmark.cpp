#include <gtest/gtest.h>

#include <sstream>

#include "oracles.hpp"
#include "rearrange/benchmark.hpp"
#include "rearrange/oracle_backend.hpp"

using namespace rearrange;

namespace {

BenchmarkConfig base_config(ChatBackend& llm, const ExperienceStore* store) {
    BenchmarkConfig c;
    c.scenes_dir = oracle::data_dir() / "scenes";
    c.llm = &llm;
    c.store = store;
    return c;
}

const InstructionResult& find(const EvalReport& r, Method m, int scenario, int number) {
    for (const auto& x : r.results) {
        if (x.method == m && x.scenario == scenario && x.number == number) return x;
    }
    throw std::runtime_error("missing result");
}

}  // namespace

TEST(Instructions, FifteenInThreeScenarios) {
    const auto& list = benchmark_instructions();
    ASSERT_EQ(list.size(), 15u);
    for (int s = 1; s <= 3; ++s) {
        EXPECT_EQ(std::count_if(list.begin(), list.end(), [&](const auto& i) { return i.scenario == s; }), 5);
    }
    EXPECT_EQ(scenario_label(3), "Sequential order");
}

TEST(Methods, NamesRoundTrip) {
    for (auto m : {Method::random, Method::geometric, Method::ours_no_ref, Method::ours_with_ref}) {
        EXPECT_EQ(method_from_string(to_string(m)), m);
    }
    EXPECT_EQ(method_label(Method::ours_with_ref), "Ours");
    EXPECT_FALSE(method_from_string("magic"));
}

TEST(Judge, UsesEveryStepScene) {
    const auto initial = load_scene_file((oracle::data_dir() / "scenes" / "scene1.json").string());
    const auto right = initial.apply_move(Placement{"eggplant", 430, 240, 0.0});
    const auto left = initial.apply_move(Placement{"eggplant", 210, 240, 0.0});
    const std::string instr = "put the eggplant on the right of the plate, then on the left of the plate";
    EXPECT_TRUE(judge(initial, {&right, &left}, instr, {}).satisfied);
    const auto r = judge(initial, {&left, &left}, instr, {});
    EXPECT_FALSE(r.satisfied);
    ASSERT_EQ(r.detail.size(), 2u);
    EXPECT_NE(r.detail[0].find("false"), std::string::npos);
    EXPECT_NE(r.detail[1].find("true"), std::string::npos);
}

TEST(Benchmark, OracleSolvesEverything) {
    OracleBackend llm;
    const auto store = seed_store(oracle::data_dir() / "seed_store");
    auto cfg = base_config(llm, &store);
    cfg.methods = {Method::ours_no_ref, Method::ours_with_ref};
    const auto report = run_benchmark(cfg);
    ASSERT_EQ(report.results.size(), 30u);
    for (const auto& r : report.results) EXPECT_TRUE(r.satisfied) << r.instruction << " " << r.error.value_or("");
    EXPECT_DOUBLE_EQ(report.success_rate(Method::ours_with_ref), 1.0);
}

TEST(Benchmark, BaselinesAreWeakAndDeterministic) {
    ScriptedBackend llm;
    auto cfg = base_config(llm, nullptr);
    cfg.methods = {Method::random, Method::geometric};
    const auto a = run_benchmark(cfg);
    const auto b = run_benchmark(cfg);
    EXPECT_EQ(report_to_json(a), report_to_json(b));
    EXPECT_LT(a.success_rate(Method::random), 1.0);
    EXPECT_LT(a.success_rate(Method::geometric), 1.0);
    // Regression value for seed 0.
    EXPECT_NEAR(a.success_rate(Method::random), 1.0 / 15.0, 1e-12);
    EXPECT_FALSE(find(a, Method::geometric, 2, 3).satisfied);
}

TEST(Benchmark, MissingFixture) {
    ScriptedBackend llm;
    auto cfg = base_config(llm, nullptr);
    cfg.scenes_dir = "/nonexistent";
    EXPECT_THROW(run_benchmark(cfg), StorageError);
}

TEST(Render, TableAndCsvStructure) {
    EvalReport report;
    report.methods = {Method::random, Method::ours_with_ref};
    for (const auto& i : benchmark_instructions()) {
        report.results.push_back({Method::random, i.scenario, i.number, i.text, i.scenario == 1 && i.number == 1, {}, {}});
        report.results.push_back({Method::ours_with_ref, i.scenario, i.number, i.text, true, {}, {}});
    }
    EXPECT_NEAR(report.scenario_rate(Method::random, 1), 0.2, 1e-12);
    const auto table = render_table(report);
    std::istringstream lines(table);
    std::string header, row1, row2;
    std::getline(lines, header);
    std::getline(lines, row1);
    std::getline(lines, row2);
    for (const char* col : {"Method", "Single object", "Multiple objects", "Sequential order", "Mean"}) {
        EXPECT_NE(header.find(col), std::string::npos);
    }
    EXPECT_EQ(row1.rfind("Random", 0), 0u);
    EXPECT_EQ(row2.rfind("Ours", 0), 0u);
    EXPECT_EQ(render_csv(report),
              "method,single_object,multiple_objects,sequential_order,mean\n"
              "random,0.20,0.00,0.00,0.07\n"
              "ours_with_ref,1.00,1.00,1.00,1.00\n");
    const auto j = report_to_json(report);
    EXPECT_EQ(j["methods"].size(), 2u);
    EXPECT_EQ(j["results"].size(), 30u);
}
