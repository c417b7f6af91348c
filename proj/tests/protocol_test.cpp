#include "hlps/protocol.hpp"

#include <algorithm>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "hlps/geometry.hpp"

namespace hlps {
namespace {

BroadcastMessage msg(std::uint64_t id, double p, Point2D pos = {0, 0}) {
  return {UserId{id}, pos, ServiceTag("restaurant"), PrivacyLevel(p)};
}

std::vector<User> make_users(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<User> users;
  for (std::size_t i = 0; i < n; ++i) {
    users.push_back({UserId{i + 1}, {1000 * u(gen), 1000 * u(gen)}, PrivacyLevel(u(gen)), 125.0});
  }
  return users;
}

ProviderModel make_provider(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> u(0.0, 1000.0);
  ProviderModel provider;
  for (std::size_t i = 0; i < n; ++i) {
    provider.pois.push_back({i + 1, {u(gen), u(gen)}, ServiceTag(i % 3 ? "restaurant" : "bank")});
  }
  return provider;
}

const ProtocolConfig kConfig{NoiseConfig{}, ServiceTag("restaurant")};

TEST(Obfuscate, DisplacementBoundedByRadiusMap) {
  Rng rng(1);
  const NoiseConfig noise;
  const Point2D origin{100, 200};
  for (int i = 0; i < 5000; ++i) {
    EXPECT_LE(distance(obfuscate(origin, PrivacyLevel(0.0), noise, rng), origin), 5.0);
    EXPECT_LE(distance(obfuscate(origin, PrivacyLevel(1.0), noise, rng), origin), 50.0);
  }
}

TEST(Obfuscate, UniformDiskMeanDisplacement) {
  // For a uniform draw from a disk of radius R, E|X| = 2R/3.
  Rng rng(2024);
  const NoiseConfig noise;
  const double radius = 27.5;
  ASSERT_DOUBLE_EQ(noise.radius(PrivacyLevel(0.5)), radius);
  double sum = 0;
  const int draws = 10000;
  for (int i = 0; i < draws; ++i) {
    sum += distance(obfuscate({0, 0}, PrivacyLevel(0.5), noise, rng), {0, 0});
  }
  EXPECT_NEAR(sum / draws / (2.0 * radius / 3.0), 1.0, 0.02);
}

TEST(Obfuscate, RejectsBadNoiseConfig) {
  Rng rng(1);
  for (auto bad : {NoiseConfig{60, 50}, NoiseConfig{-1, 50}}) {
    try {
      obfuscate({0, 0}, PrivacyLevel(0.5), bad, rng);
      FAIL();
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::kBadNoiseConfig);
    }
  }
}

TEST(ElectQu, LowestPrivacyWins) {
  const std::vector<BroadcastMessage> m{msg(1, 0.3), msg(2, 0.7)};
  EXPECT_EQ(elect_qu(m), UserId{1});
}

TEST(ElectQu, TieGoesToSmallestId) {
  const std::vector<BroadcastMessage> m{msg(2, 0.4), msg(1, 0.4)};
  EXPECT_EQ(elect_qu(m), UserId{1});
}

TEST(ElectQu, MatchesLinearScan) {
  std::mt19937_64 gen(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<BroadcastMessage> m;
    for (std::uint64_t i = 0; i < 100; ++i) m.push_back(msg(1000 - i, std::round(u(gen) * 20) / 20));
    std::size_t best = 0;
    for (std::size_t i = 1; i < m.size(); ++i) {
      const double pi = m[i].privacy.value();
      const double pb = m[best].privacy.value();
      if (pi < pb || (pi == pb && m[i].sender.value < m[best].sender.value)) best = i;
    }
    EXPECT_EQ(elect_qu(m), m[best].sender);
  }
}

TEST(ElectQu, Errors) {
  try {
    elect_qu(std::vector<BroadcastMessage>{});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kNoParticipants);
  }
  try {
    elect_qu(std::vector<BroadcastMessage>{msg(1, 0.1), msg(1, 0.2)});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kDuplicateSender);
  }
}

TEST(FinalLocation, MeanOfBroadcasts) {
  const std::vector<BroadcastMessage> line{msg(1, 0.1, {0, 0}), msg(2, 0.2, {10, 0}),
                                           msg(3, 0.3, {20, 0})};
  EXPECT_EQ(final_location(line), (Point2D{10, 0}));
  const std::vector<BroadcastMessage> one{msg(4, 0.5, {4, 9})};
  EXPECT_EQ(final_location(one), (Point2D{4, 9}));
  EXPECT_THROW(final_location(std::vector<BroadcastMessage>{}), Error);
}

TEST(FinalLocation, CentroidOnRegressionLine) {
  std::mt19937_64 gen(77);
  std::uniform_real_distribution<double> u(0.0, 1000.0);
  std::vector<BroadcastMessage> m;
  std::vector<Point2D> pts;
  for (std::uint64_t i = 0; i < 25; ++i) {
    const Point2D p{u(gen), u(gen)};
    m.push_back(msg(i + 1, 0.5, p));
    pts.push_back(p);
  }
  const Point2D f = final_location(m);
  EXPECT_EQ(f, centroid(pts));
  EXPECT_LE(ols_fit(pts).distance_to(f), 1e-9);
}

TEST(FinalLocation, IndependentOfWhoIsElected) {
  std::vector<BroadcastMessage> m{msg(1, 0.1, {1, 2}), msg(2, 0.5, {30, -4}), msg(3, 0.9, {7, 70})};
  const Point2D before = final_location(m);
  const UserId qu_before = elect_qu(m);
  std::swap(m[0].privacy, m[2].privacy);
  EXPECT_NE(elect_qu(m), qu_before);
  EXPECT_EQ(final_location(m), before);
}

TEST(BuildQuery, TranscribesFields) {
  EXPECT_EQ(build_query(UserId{3}, {1, 2}, ServiceTag("bank")),
            (LbsQuery{UserId{3}, {1, 2}, ServiceTag("bank")}));
  EXPECT_EQ(build_query(UserId{0}, {0, 0}, ServiceTag("taxi")),
            (LbsQuery{UserId{0}, {0, 0}, ServiceTag("taxi")}));
}

TEST(Forward, OnePerPeer) {
  LbsResponse response{kProviderId, UserId{3}, {{7, {1, 1}, ServiceTag("bank")}}};
  EXPECT_TRUE(forward(response, std::vector<UserId>{UserId{3}}).empty());

  const std::vector<UserId> two{UserId{3}, UserId{9}};
  const auto f2 = forward(response, two);
  ASSERT_EQ(f2.size(), 1u);
  EXPECT_EQ(f2[0].recipient, UserId{9});
  EXPECT_EQ(f2[0].qu, UserId{3});

  const std::vector<UserId> five{UserId{1}, UserId{2}, UserId{3}, UserId{4}, UserId{5}};
  const auto f5 = forward(response, five);
  ASSERT_EQ(f5.size(), 4u);
  for (const auto& f : f5) {
    EXPECT_NE(f.recipient, UserId{3});
    EXPECT_EQ(f.payload, response.payload);
  }
}

TEST(Forward, QuMustBeInGroup) {
  LbsResponse response{kProviderId, UserId{42}, {}};
  try {
    forward(response, std::vector<UserId>{UserId{1}});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kQuNotInGroup);
  }
}

TEST(RunRound, SendCountLaw) {
  const auto provider = make_provider(500, 3);
  for (std::size_t n : {1u, 2u, 5u, 10u, 50u}) {
    Rng rng(n);
    const auto users = make_users(n, 10 + n);
    const auto out = run_round(users, provider, kConfig, rng);
    EXPECT_EQ(out.trace.size(), 2 * n + 1) << "N=" << n;
    EXPECT_EQ(std::ranges::count(out.trace, MessageKind::kBroadcast, &TraceEntry::kind),
              static_cast<std::ptrdiff_t>(n));
    EXPECT_EQ(std::ranges::count(out.trace, MessageKind::kForward, &TraceEntry::kind),
              static_cast<std::ptrdiff_t>(n - 1));
  }
}

TEST(RunRound, SingleUserTrace) {
  const auto provider = make_provider(100, 3);
  Rng rng(1);
  const auto users = make_users(1, 1);
  const auto out = run_round(users, provider, kConfig, rng);
  ASSERT_EQ(out.trace.size(), 3u);
  EXPECT_EQ(out.trace[0].kind, MessageKind::kBroadcast);
  EXPECT_TRUE(out.trace[0].receivers.empty());
  EXPECT_EQ(out.trace[1].kind, MessageKind::kQuery);
  EXPECT_EQ(out.trace[2].kind, MessageKind::kResponse);
  EXPECT_EQ(out.elected_qu, users[0].id);
  EXPECT_EQ(out.final_location, out.broadcasts[0].obfuscated_position);
}

TEST(RunRound, RoundInvariants) {
  const auto provider = make_provider(3000, 4);
  const auto users = make_users(12, 99);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Rng rng(seed);
    const auto out = run_round(users, provider, kConfig, rng);

    for (std::size_t i = 0; i < users.size(); ++i) {
      EXPECT_LE(distance(out.broadcasts[i].obfuscated_position, users[i].true_position),
                kConfig.noise.radius(users[i].privacy) + 1e-9);
    }
    const auto qu = std::ranges::find(users, out.elected_qu, &User::id);
    ASSERT_NE(qu, users.end());
    for (const auto& u : users) EXPECT_LE(qu->privacy, u.privacy);

    EXPECT_EQ(out.query.query_position, out.final_location);
    EXPECT_EQ(out.final_location, final_location(out.broadcasts));
    ASSERT_EQ(out.per_user_payloads.size(), users.size());
    for (const auto& [id, payload] : out.per_user_payloads) EXPECT_EQ(payload, out.response.payload);
    for (const auto& poi : out.response.payload) {
      EXPECT_LE(distance(poi.position, out.final_location), provider.serving_radius);
    }
  }
}

TEST(RunRound, Deterministic) {
  const auto provider = make_provider(1000, 5);
  const auto users = make_users(8, 6);
  Rng a(123), b(123);
  EXPECT_EQ(run_round(users, provider, kConfig, a), run_round(users, provider, kConfig, b));
}

TEST(RunRound, RejectsDuplicateIds) {
  auto users = make_users(3, 1);
  users[2].id = users[0].id;
  Rng rng(1);
  EXPECT_THROW(run_round(users, ProviderModel{}, kConfig, rng), Error);
}

TEST(PrivacyLevel, Domain) {
  EXPECT_THROW(PrivacyLevel(-0.1), Error);
  EXPECT_THROW(PrivacyLevel(1.1), Error);
  EXPECT_THROW(PrivacyLevel(std::nan("")), Error);
  EXPECT_NO_THROW(PrivacyLevel(0.0));
  EXPECT_NO_THROW(PrivacyLevel(1.0));
  EXPECT_THROW(ServiceTag(""), Error);
}

}  // namespace
}  // namespace hlps
