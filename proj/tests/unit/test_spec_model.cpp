#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "restcheck/digest.hpp"
#include "restcheck/spec/spec_model.hpp"
#include "restcheck/testkit/fixtures.hpp"

using namespace restcheck;
using restcheck::testkit::spec_fixture;

namespace {

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no Error thrown";
  return ErrorCode::internal;
}

std::filesystem::path write_temp(const std::string& name, const std::string& text) {
  auto path = std::filesystem::temp_directory_path() / ("restcheck-spec-" + name);
  std::ofstream(path) << text;
  return path;
}

}  // namespace

TEST(SpecFixtures, PetstoreHasNineteenOperations) {
  auto spec = spec::load_spec(spec_fixture("petstore3").string());
  EXPECT_EQ(spec.operations.size(), 19u);
  EXPECT_EQ(spec.operations.front().id, "op1");
  EXPECT_EQ(spec.operations.back().id, "op19");
}

TEST(SpecFixtures, CatFactHasThreeOperations) {
  auto spec = spec::load_spec(spec_fixture("catfact").string());
  ASSERT_EQ(spec.operations.size(), 3u);
  EXPECT_EQ(spec.host_url, "https://catfact.ninja");
  EXPECT_EQ(spec.operations[0].key(), "GET /breeds");
  EXPECT_EQ(spec.operations[1].key(), "GET /fact");
  EXPECT_EQ(spec.operations[2].key(), "GET /facts");
}

TEST(SpecFixtures, PinnedHashesMatch) {
  auto pinned = Json::parse(testkit::read_file(testkit::fixture_dir() / "hashes.json"));
  ASSERT_FALSE(pinned.empty());
  for (const auto& [name, hash] : pinned.items()) {
    auto text = testkit::read_file(testkit::fixture_dir() / "specs" / name);
    EXPECT_EQ(sha256_hex(text), hash.get<std::string>()) << name;
  }
}

TEST(SpecParse, OperationsFollowDocumentOrder) {
  auto spec = spec::load_spec(spec_fixture("items").string());
  ASSERT_EQ(spec.operations.size(), 3u);
  EXPECT_EQ(spec.operations[0].key(), "GET /items");
  EXPECT_EQ(spec.operations[1].key(), "POST /items");
  EXPECT_EQ(spec.operations[2].key(), "GET /items/{itemId}");
  EXPECT_EQ(spec.title, "Sample Items Service");
  EXPECT_EQ(spec.version_tag, "3.0.3");
}

TEST(SpecParse, RelativeServerUrlResolvesAgainstSource) {
  auto doc = Json::parse(testkit::read_file(spec_fixture("petstore3")));
  auto spec = spec::parse_spec(doc, "https://petstore3.swagger.io/api/v3/openapi.json");
  EXPECT_EQ(spec.host_url, "https://petstore3.swagger.io/api/v3");
}

TEST(SpecParse, SwaggerTwoUsesHostAndBasePath) {
  auto spec = spec::load_spec(spec_fixture("swagger2_mini").string());
  EXPECT_EQ(spec.host_url, "https://api.example.test/v1");
  EXPECT_EQ(spec.version_tag, "2.0");
  ASSERT_EQ(spec.operations.size(), 2u);
  const auto& get = spec.operations[0];
  // Path-level parameter merged with the operation's own.
  ASSERT_EQ(get.parameters.size(), 2u);
  EXPECT_EQ(get.parameters[0].name, "thingId");
  EXPECT_TRUE(get.parameters[0].required);
  EXPECT_EQ(get.parameters[0].location, spec::ParamLocation::path);
  EXPECT_FALSE(spec.warnings.empty());  // "/broken" is skipped
  const auto& put = spec.operations[1];
  EXPECT_TRUE(put.request_body_schema.has_value());
}

TEST(SpecParse, RecursiveSchemaGetsCycleMarker) {
  auto spec = spec::load_spec(spec_fixture("recursive").string());
  ASSERT_EQ(spec.operations.size(), 1u);
  const auto& schema = *spec.operations[0].responses.at("200").resolved_schema;
  const auto& items = schema.at("properties").at("children").at("items");
  EXPECT_EQ(items.at("$cycle").get<std::string>(), "#/components/schemas/Node");
}

TEST(SpecParse, DanglingRefIsReported) {
  Json doc = Json::parse(R"({"openapi":"3.0.0","info":{"title":"t"},"paths":{"/a":{"get":{
      "responses":{"200":{"description":"x","content":{"application/json":{"schema":{"$ref":"#/components/schemas/Nope"}}}}}}}}})");
  try {
    auto spec = spec::parse_spec(doc, "mem");
    // Either the operation is kept with a warning or parsing fails with dangling_ref.
    EXPECT_FALSE(spec.warnings.empty());
  } catch (const Error& e) {
    EXPECT_TRUE(e.code() == ErrorCode::dangling_ref || e.code() == ErrorCode::spec_no_operations);
  }
}

TEST(SpecErrors, MissingFileIsUnreachable) {
  EXPECT_EQ(code_of([] { spec::load_spec("/nonexistent/restcheck/spec.json"); }), ErrorCode::spec_unreachable);
}

TEST(SpecErrors, UnreachableUrl) {
  EXPECT_EQ(code_of([] { spec::load_spec("http://127.0.0.1:1/openapi.json"); }), ErrorCode::spec_unreachable);
}

TEST(SpecErrors, NotJson) {
  auto path = write_temp("notjson.json", "openapi: 3.0.0\npaths: {}\n");
  EXPECT_EQ(code_of([&] { spec::load_spec(path.string()); }), ErrorCode::spec_not_json);
}

TEST(SpecErrors, NoPathsAndNoOperations) {
  EXPECT_EQ(code_of([] { spec::parse_spec(Json::parse(R"({"openapi":"3.0.0"})"), "mem"); }), ErrorCode::spec_no_paths);
  EXPECT_EQ(code_of([] { spec::parse_spec(Json::parse(R"({"openapi":"3.0.0","paths":{"/a":{}}})"), "mem"); }),
            ErrorCode::spec_no_operations);
}

TEST(SpecStatusCodes, DefaultAndRangesAreFlaggedNotCounted) {
  auto spec = spec::load_spec(spec_fixture("swagger2_mini").string());
  auto codes = spec::expected_status_codes(spec.operations[0]);
  EXPECT_EQ(codes.codes, (std::set<std::string>{"200"}));
  EXPECT_TRUE(codes.has_default);
  EXPECT_FALSE(codes.has_range);
}

TEST(SpecPaths, TemplateMatching) {
  EXPECT_TRUE(spec::path_matches("/pet/{petId}", "/pet/12"));
  EXPECT_FALSE(spec::path_matches("/pet/{petId}", "/pet"));
  EXPECT_FALSE(spec::path_matches("/pet/{petId}", "/pet/12/x"));
  EXPECT_TRUE(spec::path_matches("/pet/findByStatus", "/pet/findByStatus"));
  EXPECT_FALSE(spec::path_matches("/pet/{petId}", "/user/12"));
}

TEST(SpecDetail, RenderingIsDeterministicAndComplete) {
  auto spec = spec::load_spec(spec_fixture("items").string());
  const auto& op = spec.operations[2];
  auto a = spec::render_operation_detail(op);
  EXPECT_EQ(a, spec::render_operation_detail(op));
  EXPECT_NE(a.find("URI path: /items/{itemId}\nMethod: GET\n"), std::string::npos);
  EXPECT_NE(a.find("name: itemId"), std::string::npos);
  EXPECT_NE(a.find("status: 404"), std::string::npos);
}

TEST(SpecMethods, ParseIsCaseInsensitive) {
  EXPECT_EQ(spec::parse_method("Delete"), spec::HttpMethod::del);
  EXPECT_EQ(spec::to_string(spec::HttpMethod::del), "DELETE");
  EXPECT_FALSE(spec::parse_method("trace").has_value());
}
