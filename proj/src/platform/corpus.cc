#include "fyp/platform/corpus.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iterator>
#include <map>
#include <unordered_set>

#include "fyp/common/error.h"
#include "fyp/common/seed.h"
#include "fyp/common/text.h"
#include "nlohmann/json.hpp"

namespace fyp::platform {
namespace {

using nlohmann::json;

// Flavor vocabulary for the built-in topics. Keywords themselves come from
// the profile, so custom topics still get keyword-bearing metadata.
const std::map<std::string, std::vector<std::string>>& TopicFlavor() {
  static const std::map<std::string, std::vector<std::string>> kFlavor = {
      {"cooking",
       {"garlic butter pasta", "lemon chicken", "sourdough loaf", "ramen bowl",
        "chocolate cake", "veggie stir fry", "street tacos", "banana bread", "dinner ideas",
        "meal prep", "kitchen hacks", "homemade dumplings", "one pot meals", "chef life"}},
      {"fitness",
       {"leg day", "gym routine", "cardio", "protein", "squats", "running club",
        "yoga flow", "strength training", "core workout", "pull ups", "mobility drills",
        "rest day", "personal trainer", "gains"}},
      {"sports_betting",
       {"odds", "picks of the day", "point spread", "sportsbook", "bankroll", "nba props",
        "nfl sunday", "over under", "lock of the day", "underdog", "betting slip",
        "moneyline", "live odds", "big win"}},
  };
  return kFlavor;
}

const std::vector<std::string>& NeutralThemes() {
  static const std::vector<std::string> kThemes = {
      "travel vlog",     "puppy training",  "cat videos",      "guitar cover",
      "stand up comedy", "street fashion",  "thrift haul",     "speedrun",
      "dance challenge", "phone unboxing",  "desk setup",      "woodworking",
      "car detailing",   "watercolor art",  "book review",     "movie trailer",
      "makeup tutorial", "skincare routine", "city tour",      "beach sunset",
      "plant care",      "home decor",      "magic trick",     "prank",
      "study with me",   "coding tips",     "photography",     "road trip",
      "lofi beats",      "karaoke",         "skateboarding",   "origami",
      "anime edit",      "history facts",   "space facts",     "language learning",
      "budget travel",   "night market",    "concert clip",    "wedding day",
  };
  return kThemes;
}

const std::vector<std::string>& Fillers() {
  static const std::vector<std::string> kFillers = {
      "you have to see this", "part 2", "wait for it", "storytime", "pov", "day in my life",
      "no way", "this changed everything", "tell me why", "rate this", "follow for more",
      "so good", "trying this again", "honest review", "the end got me", "weekend vibes",
  };
  return kFillers;
}

const std::vector<std::string>& Syllables() {
  static const std::vector<std::string> kSyllables = {
      "ka", "lo", "mi", "ra", "zen", "tu", "bel", "no", "vi", "sa", "quin", "do",
      "ae", "ro", "li", "ma", "jo", "ty", "ne", "pa"};
  return kSyllables;
}

template <typename T>
const T& Pick(const std::vector<T>& items, Rng& rng) {
  std::uniform_int_distribution<std::size_t> d(0, items.size() - 1);
  return items[d(rng)];
}

std::string Tagify(std::string_view phrase) {
  std::string out;
  for (char c : phrase) {
    if (c != ' ') out.push_back(c);
  }
  return out;
}

std::string Nickname(Rng& rng) {
  std::uniform_int_distribution<int> n_syl(2, 3);
  std::uniform_int_distribution<int> digits(0, 999);
  std::string nick;
  int n = n_syl(rng);
  for (int i = 0; i < n; ++i) nick += Pick(Syllables(), rng);
  if (digits(rng) % 2 == 0) nick += "_" + std::to_string(digits(rng));
  return nick;
}

bool MentionsAnyKeyword(const Video& v, const std::vector<TopicProfile>& profiles) {
  for (const auto& p : profiles) {
    for (const auto& k : p.keywords) {
      if (ContainsPhrase(v.description, k) || ContainsPhrase(v.author_nickname, k) ||
          ContainsPhrase(v.author_signature, k)) {
        return true;
      }
      for (const auto& h : v.hashtags) {
        if (ContainsPhrase(h, k)) return true;
      }
      for (const auto& s : v.suggested_words) {
        if (ContainsPhrase(s, k)) return true;
      }
    }
  }
  return false;
}

void FillOnTopic(Video& v, const std::vector<const TopicProfile*>& topics, Rng& rng) {
  const TopicProfile& primary = *topics.front();
  const auto& flavor_map = TopicFlavor();
  auto flavor_it = flavor_map.find(primary.topic_id);
  const std::vector<std::string>& flavor =
      flavor_it != flavor_map.end() ? flavor_it->second : primary.keywords;
  const std::string& keyword = Pick(primary.keywords, rng);
  const std::string& dish = Pick(flavor, rng);

  std::uniform_int_distribution<int> tmpl(0, 3);
  switch (tmpl(rng)) {
    case 0: v.description = dish + " " + Pick(Fillers(), rng) + " #" + Tagify(keyword); break;
    case 1: v.description = "my " + keyword + " routine: " + dish; break;
    case 2: v.description = Pick(Fillers(), rng) + " | " + keyword + " with " + dish; break;
    default: v.description = "quick " + keyword + " idea - " + dish; break;
  }
  for (std::size_t i = 1; i < topics.size(); ++i) {
    v.description += " + " + Pick(topics[i]->keywords, rng);
  }

  std::uniform_int_distribution<int> n_tags(1, 3);
  v.hashtags.push_back(Tagify(keyword));
  for (int i = n_tags(rng); i > 0; --i) v.hashtags.push_back(Tagify(Pick(flavor, rng)));
  v.hashtags.push_back("fyp");

  std::uniform_int_distribution<int> n_words(2, 4);
  v.suggested_words.push_back(Pick(primary.keywords, rng));
  for (int i = n_words(rng); i > 0; --i) v.suggested_words.push_back(Pick(flavor, rng));

  v.author_nickname = Nickname(rng);
  std::uniform_int_distribution<int> coin(0, 1);
  v.author_signature = coin(rng) ? "sharing " + Pick(flavor, rng) + " every day"
                                 : Pick(Fillers(), rng);
}

void FillOffTopic(Video& v, Rng& rng) {
  const std::string& theme = Pick(NeutralThemes(), rng);
  std::uniform_int_distribution<int> tmpl(0, 2);
  switch (tmpl(rng)) {
    case 0: v.description = theme + " " + Pick(Fillers(), rng); break;
    case 1: v.description = Pick(Fillers(), rng) + " | " + theme; break;
    default: v.description = theme + " #" + Tagify(Pick(NeutralThemes(), rng)); break;
  }
  std::uniform_int_distribution<int> n_tags(1, 3);
  v.hashtags.push_back(Tagify(theme));
  for (int i = n_tags(rng); i > 0; --i) v.hashtags.push_back(Tagify(Pick(NeutralThemes(), rng)));
  v.hashtags.push_back("fyp");
  std::uniform_int_distribution<int> n_words(2, 4);
  for (int i = n_words(rng); i > 0; --i) v.suggested_words.push_back(Pick(NeutralThemes(), rng));
  v.author_nickname = Nickname(rng);
  v.author_signature = "just here for " + Pick(NeutralThemes(), rng);
}

json ProfileToJson(const TopicProfile& p) {
  return json{{"topic_id", p.topic_id},
              {"display_name", p.display_name},
              {"base_prevalence", p.base_prevalence},
              {"keywords", p.keywords}};
}

TopicProfile ProfileFromJson(const json& j) {
  TopicProfile p;
  p.topic_id = j.at("topic_id").get<std::string>();
  p.display_name = j.value("display_name", p.topic_id);
  p.base_prevalence = j.at("base_prevalence").get<double>();
  p.keywords = j.at("keywords").get<std::vector<std::string>>();
  return p;
}

}  // namespace

void ValidateProfiles(const std::vector<TopicProfile>& profiles) {
  double sum = 0.0;
  std::unordered_set<std::string> ids;
  for (const auto& p : profiles) {
    if (p.topic_id.empty()) throw Error(ErrorCode::kConfig, "topic with empty id");
    if (!ids.insert(p.topic_id).second) {
      throw Error(ErrorCode::kConfig, "duplicate topic '" + p.topic_id + "'");
    }
    if (!(p.base_prevalence >= 0.0 && p.base_prevalence <= 1.0)) {
      throw Error(ErrorCode::kConfig, "topic '" + p.topic_id + "' base_prevalence outside [0,1]");
    }
    if (p.keywords.empty()) {
      throw Error(ErrorCode::kConfig, "topic '" + p.topic_id + "' has no keywords");
    }
    sum += p.base_prevalence;
  }
  if (sum > 1.0 + 1e-12) {
    throw Error(ErrorCode::kConfig, "topic base prevalences sum to more than 1");
  }
}

Corpus::Corpus(std::vector<TopicProfile> topics, std::vector<Video> videos)
    : topics_(std::move(topics)), videos_(std::move(videos)) {
  topic_pools_.resize(topics_.size());
  by_id_.reserve(videos_.size());
  for (std::uint32_t i = 0; i < videos_.size(); ++i) {
    const Video& v = videos_[i];
    if (!by_id_.emplace(v.video_id, i).second) {
      throw Error(ErrorCode::kConfig, "duplicate video id " + v.video_id);
    }
    if (v.duration_ms <= 0) {
      throw Error(ErrorCode::kConfig, "video " + v.video_id + " has non-positive duration");
    }
    if (v.true_topics.empty()) off_topic_pool_.push_back(i);
    for (const auto& t : v.true_topics) {
      auto idx = TopicIndex(t);
      if (!idx) throw Error(ErrorCode::kConfig, "video " + v.video_id + " has unknown topic " + t);
      topic_pools_[*idx].push_back(i);
    }
  }
}

std::optional<std::size_t> Corpus::TopicIndex(std::string_view topic_id) const {
  for (std::size_t i = 0; i < topics_.size(); ++i) {
    if (topics_[i].topic_id == topic_id) return i;
  }
  return std::nullopt;
}

const TopicProfile& Corpus::Topic(std::string_view topic_id) const {
  auto idx = TopicIndex(topic_id);
  if (!idx) throw Error(ErrorCode::kNotFound, "unknown topic '" + std::string(topic_id) + "'");
  return topics_[*idx];
}

std::optional<std::uint32_t> Corpus::IndexOf(std::string_view video_id) const {
  auto it = by_id_.find(std::string(video_id));
  if (it == by_id_.end()) return std::nullopt;
  return it->second;
}

std::string Corpus::Serialize() const {
  std::string out;
  json header{{"format", "fyp-corpus"}, {"version", 1}, {"topics", json::array()}};
  for (const auto& t : topics_) header["topics"].push_back(ProfileToJson(t));
  out += header.dump() + "\n";
  for (const auto& v : videos_) {
    json j{{"video_id", v.video_id},
           {"description", v.description},
           {"hashtags", v.hashtags},
           {"suggested_words", v.suggested_words},
           {"author_nickname", v.author_nickname},
           {"author_signature", v.author_signature},
           {"duration_ms", v.duration_ms},
           {"true_topics", v.true_topics}};
    out += j.dump() + "\n";
  }
  return out;
}

Corpus Corpus::Parse(std::string_view text) {
  auto lines = Split(text, '\n');
  if (lines.empty() || lines.front().empty()) {
    throw Error(ErrorCode::kConfig, "corpus file is empty");
  }
  std::vector<TopicProfile> topics;
  std::vector<Video> videos;
  try {
    json header = json::parse(lines.front());
    if (header.value("format", "") != "fyp-corpus") {
      throw Error(ErrorCode::kConfig, "not a corpus file");
    }
    for (const auto& t : header.at("topics")) topics.push_back(ProfileFromJson(t));
    for (std::size_t i = 1; i < lines.size(); ++i) {
      if (lines[i].empty()) continue;
      json j = json::parse(lines[i]);
      Video v;
      v.video_id = j.at("video_id").get<std::string>();
      v.description = j.at("description").get<std::string>();
      v.hashtags = j.at("hashtags").get<std::vector<std::string>>();
      v.suggested_words = j.at("suggested_words").get<std::vector<std::string>>();
      v.author_nickname = j.at("author_nickname").get<std::string>();
      v.author_signature = j.at("author_signature").get<std::string>();
      v.duration_ms = j.at("duration_ms").get<std::int64_t>();
      v.true_topics = j.at("true_topics").get<std::vector<std::string>>();
      videos.push_back(std::move(v));
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kConfig, std::string("malformed corpus: ") + e.what());
  }
  ValidateProfiles(topics);
  return Corpus(std::move(topics), std::move(videos));
}

void Corpus::Save(const std::string& path) const {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kConfig, "cannot write corpus to " + path);
  auto text = Serialize();
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
}

Corpus Corpus::Load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kConfig, "cannot open corpus " + path);
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return Parse(text);
}

Corpus GenerateCorpus(const std::vector<TopicProfile>& profiles, const CorpusOptions& options) {
  if (options.total == 0) throw Error(ErrorCode::kConfig, "corpus size must be positive");
  if (!(options.multi_topic_rate >= 0.0 && options.multi_topic_rate <= 1.0)) {
    throw Error(ErrorCode::kConfig, "multi_topic_rate must be in [0,1]");
  }
  ValidateProfiles(profiles);

  Rng rng = MakeRng(DeriveSeed(options.seed, "corpus"));
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<std::int64_t> duration(3000, 60000);
  std::uniform_int_distribution<std::uint64_t> id_digits(100000000000000000ULL,
                                                         999999999999999999ULL);
  std::unordered_set<std::string> used_ids;
  std::vector<Video> videos;
  videos.reserve(options.total);

  for (std::size_t i = 0; i < options.total; ++i) {
    Video v;
    do {
      v.video_id = "7" + std::to_string(id_digits(rng));
    } while (!used_ids.insert(v.video_id).second);
    v.duration_ms = duration(rng);

    double u = unit(rng);
    const TopicProfile* primary = nullptr;
    double acc = 0.0;
    for (const auto& p : profiles) {
      acc += p.base_prevalence;
      if (u < acc) {
        primary = &p;
        break;
      }
    }
    if (primary) {
      std::vector<const TopicProfile*> topics{primary};
      if (profiles.size() > 1 && unit(rng) < options.multi_topic_rate) {
        const TopicProfile* second = primary;
        while (second == primary) second = &Pick(profiles, rng);
        topics.push_back(second);
      }
      FillOnTopic(v, topics, rng);
      for (const auto* t : topics) v.true_topics.push_back(t->topic_id);
      std::sort(v.true_topics.begin(), v.true_topics.end());
    } else {
      int attempts = 0;
      do {
        v.description.clear();
        v.hashtags.clear();
        v.suggested_words.clear();
        FillOffTopic(v, rng);
        if (++attempts > 64) {
          throw Error(ErrorCode::kConfig,
                      "topic keywords collide with the neutral vocabulary; cannot build "
                      "keyword-free off-topic metadata");
        }
      } while (MentionsAnyKeyword(v, profiles));
    }
    videos.push_back(std::move(v));
  }
  return Corpus(profiles, std::move(videos));
}

}  // namespace fyp::platform
