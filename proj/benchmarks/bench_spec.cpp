#include <benchmark/benchmark.h>

#include <map>
#include <string>

#include "restcheck/spec/spec_model.hpp"
#include "restcheck/testkit/fixtures.hpp"

namespace {

using restcheck::Json;

const Json& document(const std::string& name) {
  static std::map<std::string, Json> cache;
  auto it = cache.find(name);
  if (it == cache.end()) {
    it = cache.emplace(name, Json::parse(restcheck::testkit::read_file(restcheck::testkit::spec_fixture(name)))).first;
  }
  return it->second;
}

void BM_ParseSpec(benchmark::State& state, const std::string& name) {
  const auto& doc = document(name);
  for (auto _ : state) {
    auto spec = restcheck::spec::parse_spec(doc, name + ".json");
    benchmark::DoNotOptimize(spec.operations.data());
  }
}
BENCHMARK_CAPTURE(BM_ParseSpec, petstore3, std::string("petstore3"));
BENCHMARK_CAPTURE(BM_ParseSpec, items, std::string("items"));

void BM_RenderOperationDetail(benchmark::State& state) {
  const auto spec = restcheck::spec::parse_spec(document("petstore3"), "petstore3.json");
  for (auto _ : state) {
    for (const auto& op : spec.operations) benchmark::DoNotOptimize(restcheck::spec::render_operation_detail(op));
  }
}
BENCHMARK(BM_RenderOperationDetail);

}  // namespace
