#include "hlps/config.hpp"

#include <gtest/gtest.h>

namespace hlps {
namespace {

TEST(ParseConfig, MinimalFillsDefaults) {
  const auto cfg = parse_config("n_users = 7\nseed = 99\n");
  EXPECT_EQ(cfg.scenario.n_users, 7u);
  EXPECT_EQ(cfg.scenario.seed, 99u);
  EXPECT_EQ(cfg.scenario.serving_radius, 125.0);
  EXPECT_EQ(cfg.scenario.interest_radius, 125.0);
  EXPECT_EQ(cfg.scenario.noise.rho_min, 5.0);
  EXPECT_EQ(cfg.scenario.noise.rho_max, 50.0);
  EXPECT_DOUBLE_EQ(cfg.scenario.energy.e_tx, 0.66e-3);
  EXPECT_DOUBLE_EQ(cfg.scenario.energy.e_rx, 0.395e-3);
  EXPECT_EQ(cfg.output.format, OutputFormat::kJson);
  EXPECT_FALSE(cfg.emit_trace);
}

TEST(ParseConfig, Sections) {
  const auto cfg = parse_config(R"(# scenario file
[scenario]
n_users = 4
privacy = list:0.1 0.2
poi_categories = restaurant, bank
service = bank

[noise]
rho_min = 1
rho_max = 2.5
[provider]
serving_radius = 300
[energy]
e_tx_mj = 1.5
e_rx_j = 0.002
[output]
format = csv
path = out.csv
trace = true
)");
  EXPECT_EQ(cfg.scenario.n_users, 4u);
  EXPECT_EQ(cfg.scenario.service.str(), "bank");
  ASSERT_EQ(cfg.scenario.poi_categories.size(), 2u);
  EXPECT_EQ(cfg.scenario.poi_categories[1].str(), "bank");
  EXPECT_EQ(cfg.scenario.noise.rho_max, 2.5);
  EXPECT_EQ(cfg.scenario.serving_radius, 300.0);
  EXPECT_DOUBLE_EQ(cfg.scenario.energy.e_tx, 1.5e-3);
  EXPECT_EQ(cfg.scenario.energy.e_rx, 0.002);
  EXPECT_EQ(cfg.output.format, OutputFormat::kCsv);
  EXPECT_EQ(cfg.output.path, "out.csv");
  EXPECT_TRUE(cfg.emit_trace);
}

TEST(ParseConfig, NoiseOrderingIsInvalid) {
  try {
    parse_config("[noise]\nrho_min = 60\nrho_max = 50\n");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.code(), ErrorCode::kConfigInvalid);
    EXPECT_EQ(e.field(), "noise");
  }
}

TEST(ParseConfig, SyntaxErrorsCarryLineNumbers) {
  try {
    parse_config("n_users = 3\n\nthis line has no equals\n");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.code(), ErrorCode::kConfigSyntax);
    EXPECT_EQ(e.line(), 3);
  }
  try {
    parse_config("[scenario\nn_users = 3\n");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.code(), ErrorCode::kConfigSyntax);
    EXPECT_EQ(e.line(), 1);
  }
  try {
    parse_config("{\n  \"n_users\": 3,\n  \"seed\": \n}");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.code(), ErrorCode::kConfigSyntax);
    EXPECT_EQ(e.line(), 4);
  }
}

TEST(ParseConfig, SemanticErrorsNameTheField) {
  auto field_of = [](const char* doc) {
    try {
      parse_config(doc);
    } catch (const ConfigError& e) {
      EXPECT_EQ(e.code(), ErrorCode::kConfigInvalid);
      return e.field();
    }
    return std::string("<no error>");
  };
  EXPECT_EQ(field_of("n_users = many\n"), "scenario.n_users");
  EXPECT_EQ(field_of("n_users = 0\n"), "scenario.n_users");
  EXPECT_EQ(field_of("colour = red\n"), "scenario.colour");
  EXPECT_EQ(field_of("[provider]\nserving_radius = -5\n"), "provider.serving_radius");
  EXPECT_EQ(field_of("privacy = fixed:2\n"), "scenario.privacy");
  EXPECT_EQ(field_of("seed = 1\nseed = 2\n"), "scenario.seed");
  EXPECT_EQ(field_of("[output]\nformat = xml\n"), "output.format");
  EXPECT_EQ(field_of("[energy]\ne_tx_mj = 1\ne_tx_j = 1\n"), "energy.e_tx");
}

TEST(ParseConfig, JsonEncoding) {
  const auto cfg = parse_config(R"({
    "n_users": 6,
    "seed": 11,
    "noise": {"rho_min": 2, "rho_max": 20},
    "scenario": {"poi_categories": ["a", "b"], "service": "a"},
    "output": {"format": "csv", "trace": true}
  })");
  EXPECT_EQ(cfg.scenario.n_users, 6u);
  EXPECT_EQ(cfg.scenario.seed, 11u);
  EXPECT_EQ(cfg.scenario.noise.rho_max, 20.0);
  EXPECT_EQ(cfg.scenario.poi_categories.size(), 2u);
  EXPECT_EQ(cfg.output.format, OutputFormat::kCsv);
  EXPECT_TRUE(cfg.emit_trace);
}

TEST(SerializeConfig, RoundTrips) {
  const char* docs[] = {
      "n_users = 3\nseed = 5\n",
      "[scenario]\nn_users = 12\nprivacy = list:0.3 0.7 0.123456789\nregion_width = 1234.5678\n"
      "poi_categories = x, y\n[energy]\ne_tx_mj = 0.1\ne_rx_j = 1e-7\n[noise]\nrho_min = 0.1\nrho_max = 0.3\n"
      "[output]\npath = r.json\ntrace = yes\n",
      "{\"privacy\": \"fixed:0.3\", \"rounds\": 0, \"energy\": {\"e_tx_mj\": 0.7}}",
  };
  for (const char* doc : docs) {
    const auto cfg = parse_config(doc);
    const auto text = serialize_config(cfg);
    EXPECT_EQ(parse_config(text), cfg) << text;
    EXPECT_EQ(serialize_config(parse_config(text)), text);
  }
}

TEST(ParseConfig, VaryBlock) {
  const auto cfg = parse_config("n_users = 3\n[vary]\nrho_max = 10, 100\nprivacy = uniform, list:0.1 0.9\n");
  ASSERT_EQ(cfg.vary.size(), 2u);
  EXPECT_EQ(cfg.vary[0].param, SweepParam::kPrivacy);  // keys are applied in sorted order
  EXPECT_EQ(cfg.vary[0].values, (std::vector<std::string>{"uniform", "list:0.1 0.9"}));
  EXPECT_EQ(cfg.vary[1].values, (std::vector<std::string>{"10", "100"}));
  EXPECT_EQ(parse_config(serialize_config(cfg)), cfg);
  EXPECT_THROW(parse_config("[vary]\nseed = 1, 2\n"), ConfigError);
  EXPECT_THROW(parse_config("[vary]\nn_users = 2, x\n"), ConfigError);
}

TEST(SeedOverride, ReplacesConfiguredSeed) {
  auto cfg = parse_config("seed = 5\n");
  apply_seed_override(cfg, nullptr);
  EXPECT_EQ(cfg.scenario.seed, 5u);
  apply_seed_override(cfg, "77");
  EXPECT_EQ(cfg.scenario.seed, 77u);
  EXPECT_THROW(apply_seed_override(cfg, "-3"), ConfigError);
}

}  // namespace
}  // namespace hlps
