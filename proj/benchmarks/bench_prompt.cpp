#include <benchmark/benchmark.h>

#include <string>

#include "restcheck/llm/prompt.hpp"

namespace {

using namespace restcheck::llm;

void BM_ParseTemplateStore(benchmark::State& state) {
  const auto text = TemplateStore::shipped_text();
  for (auto _ : state) benchmark::DoNotOptimize(TemplateStore::parse(text));
}
BENCHMARK(BM_ParseTemplateStore);

void BM_RenderScriptPrompt(benchmark::State& state) {
  const auto& tmpl = TemplateStore::shipped().get(TemplateName::generate_test_case);
  const Bindings bindings{{"selected_apis", std::string(static_cast<std::size_t>(state.range(0)), 'x')},
                          {"selected_scenarios", "Create an item and read it back."},
                          {"server_host", "http://127.0.0.1:8000"}};
  for (auto _ : state) benchmark::DoNotOptimize(render_prompt(tmpl, bindings));
}
BENCHMARK(BM_RenderScriptPrompt)->Arg(1 << 10)->Arg(1 << 16);

}  // namespace
