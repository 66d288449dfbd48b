#include "fyp/wire/messages.h"

#include "fyp/common/error.h"
#include "fyp/wire/proto.h"

namespace fyp::wire {
namespace {

std::uint64_t NonNegative(std::int64_t value, const char* what) {
  if (value < 0) {
    throw Error(ErrorCode::kEncode, std::string(what) + " is negative (" +
                                        std::to_string(value) + ")");
  }
  return static_cast<std::uint64_t>(value);
}

std::int64_t ToSigned(std::uint64_t value, std::size_t offset, const char* what) {
  if (value > static_cast<std::uint64_t>(INT64_MAX)) {
    throw DecodeError(offset, std::string(what) + " out of range");
  }
  return static_cast<std::int64_t>(value);
}

ProtoWriter WriteWatchReport(const WatchReport& m) {
  ProtoWriter w;
  w.WriteBytesIfSet(1, m.video_id);
  w.WriteVarintIfSet(2, NonNegative(m.watch_duration_ms, "watch_duration_ms"));
  w.WriteVarintIfSet(3, m.finished ? 1 : 0);
  return w;
}

WatchReport ReadWatchReport(ProtoReader r) {
  WatchReport m;
  while (r.Next()) {
    switch (r.field()) {
      case 1: m.video_id = r.ReadString(); break;
      case 2: {
        auto at = r.tag_offset();
        m.watch_duration_ms = ToSigned(r.ReadVarint(), at, "watch_duration_ms");
        break;
      }
      case 3: m.finished = r.ReadBool(); break;
      default: r.Skip();
    }
  }
  return m;
}

ProtoWriter WriteEvent(const AppLogEvent& m) {
  ProtoWriter w;
  w.WriteBytesIfSet(1, m.name);
  w.WriteBytesIfSet(2, m.account_id);
  w.WriteBytesIfSet(3, m.video_id);
  w.WriteVarintIfSet(4, NonNegative(m.dwell_ms, "dwell_ms"));
  return w;
}

AppLogEvent ReadEvent(ProtoReader r) {
  AppLogEvent m;
  while (r.Next()) {
    switch (r.field()) {
      case 1: m.name = r.ReadString(); break;
      case 2: m.account_id = r.ReadString(); break;
      case 3: m.video_id = r.ReadString(); break;
      case 4: {
        auto at = r.tag_offset();
        m.dwell_ms = ToSigned(r.ReadVarint(), at, "dwell_ms");
        break;
      }
      default: r.Skip();
    }
  }
  return m;
}

ProtoWriter WriteCard(const VideoCard& m) {
  ProtoWriter w;
  w.WriteBytesIfSet(1, m.video_id);
  w.WriteBytesIfSet(2, m.description);
  for (const auto& h : m.hashtags) w.WriteBytes(3, h);
  for (const auto& s : m.suggested_words) w.WriteBytes(4, s);
  w.WriteBytesIfSet(5, m.author_nickname);
  w.WriteBytesIfSet(6, m.author_signature);
  w.WriteVarintIfSet(7, NonNegative(m.duration_ms, "duration_ms"));
  return w;
}

VideoCard ReadCard(ProtoReader r) {
  VideoCard m;
  while (r.Next()) {
    switch (r.field()) {
      case 1: m.video_id = r.ReadString(); break;
      case 2: m.description = r.ReadString(); break;
      case 3: m.hashtags.push_back(r.ReadString()); break;
      case 4: m.suggested_words.push_back(r.ReadString()); break;
      case 5: m.author_nickname = r.ReadString(); break;
      case 6: m.author_signature = r.ReadString(); break;
      case 7: {
        auto at = r.tag_offset();
        m.duration_ms = ToSigned(r.ReadVarint(), at, "duration_ms");
        break;
      }
      default: r.Skip();
    }
  }
  return m;
}

}  // namespace

std::string Encode(const WatchReport& m) { return WriteWatchReport(m).Release(); }

std::string Encode(const FeedRequestBody& m) {
  ProtoWriter w;
  w.WriteBytesIfSet(1, m.account_id);
  w.WriteBytesIfSet(2, m.device_id);
  w.WriteVarintIfSet(3, m.session_nonce);
  for (const auto& report : m.watch_reports) w.WriteMessage(4, WriteWatchReport(report));
  w.WriteVarintIfSet(5, NonNegative(m.client_timestamp_ms, "client_timestamp_ms"));
  w.WriteVarintIfSet(6, m.count);
  return w.Release();
}

std::string Encode(const StatsBody& m) {
  ProtoWriter w;
  w.WriteBytesIfSet(1, m.account_id);
  w.WriteBytesIfSet(2, m.device_id);
  w.WriteVarintIfSet(3, m.session_nonce);
  w.WriteMessage(4, WriteWatchReport(m.report));
  w.WriteVarintIfSet(5, NonNegative(m.client_timestamp_ms, "client_timestamp_ms"));
  w.WriteVarintIfSet(6, static_cast<std::uint64_t>(m.origin));
  return w.Release();
}

std::string Encode(const FeedbackBody& m) {
  ProtoWriter w;
  w.WriteBytesIfSet(1, m.account_id);
  w.WriteBytesIfSet(2, m.device_id);
  w.WriteVarintIfSet(3, m.session_nonce);
  w.WriteBytesIfSet(4, m.video_id);
  w.WriteVarint(5, static_cast<std::uint64_t>(m.action));
  w.WriteVarintIfSet(6, NonNegative(m.client_timestamp_ms, "client_timestamp_ms"));
  return w.Release();
}

std::string Encode(const AppLogEvent& m) { return WriteEvent(m).Release(); }

std::string Encode(const AppLogBatch& m) {
  ProtoWriter w;
  w.WriteBytesIfSet(1, m.account_id);
  w.WriteBytesIfSet(2, m.device_id);
  w.WriteVarintIfSet(3, m.session_nonce);
  for (const auto& e : m.events) w.WriteMessage(4, WriteEvent(e));
  w.WriteVarintIfSet(5, NonNegative(m.client_timestamp_ms, "client_timestamp_ms"));
  return w.Release();
}

std::string Encode(const VideoCard& m) { return WriteCard(m).Release(); }

std::string Encode(const FeedPage& m) {
  ProtoWriter w;
  for (const auto& v : m.videos) w.WriteMessage(1, WriteCard(v));
  w.WriteBytesIfSet(2, m.page_token);
  return w.Release();
}

std::string Encode(const AccountCredentials& m) {
  ProtoWriter w;
  w.WriteBytesIfSet(1, m.account_id);
  w.WriteBytesIfSet(2, m.device_id);
  w.WriteBytesIfSet(3, m.key_id);
  w.WriteBytesIfSet(4, m.key);
  return w.Release();
}

WatchReport DecodeWatchReport(std::string_view bytes) {
  return ReadWatchReport(ProtoReader(bytes));
}

FeedRequestBody DecodeFeedRequest(std::string_view bytes) {
  FeedRequestBody m;
  ProtoReader r(bytes);
  while (r.Next()) {
    switch (r.field()) {
      case 1: m.account_id = r.ReadString(); break;
      case 2: m.device_id = r.ReadString(); break;
      case 3: m.session_nonce = r.ReadVarint(); break;
      case 4: m.watch_reports.push_back(ReadWatchReport(r.ReadMessage())); break;
      case 5: {
        auto at = r.tag_offset();
        m.client_timestamp_ms = ToSigned(r.ReadVarint(), at, "client_timestamp_ms");
        break;
      }
      case 6: {
        auto at = r.tag_offset();
        std::uint64_t count = r.ReadVarint();
        if (count > UINT32_MAX) throw DecodeError(at, "count out of range");
        m.count = static_cast<std::uint32_t>(count);
        break;
      }
      default: r.Skip();
    }
  }
  return m;
}

StatsBody DecodeStats(std::string_view bytes) {
  StatsBody m;
  ProtoReader r(bytes);
  while (r.Next()) {
    switch (r.field()) {
      case 1: m.account_id = r.ReadString(); break;
      case 2: m.device_id = r.ReadString(); break;
      case 3: m.session_nonce = r.ReadVarint(); break;
      case 4: m.report = ReadWatchReport(r.ReadMessage()); break;
      case 5: {
        auto at = r.tag_offset();
        m.client_timestamp_ms = ToSigned(r.ReadVarint(), at, "client_timestamp_ms");
        break;
      }
      case 6: {
        auto at = r.tag_offset();
        std::uint64_t origin = r.ReadVarint();
        if (origin > 1) throw DecodeError(at, "unknown video origin");
        m.origin = static_cast<VideoOrigin>(origin);
        break;
      }
      default: r.Skip();
    }
  }
  return m;
}

FeedbackBody DecodeFeedback(std::string_view bytes) {
  FeedbackBody m;
  ProtoReader r(bytes);
  while (r.Next()) {
    switch (r.field()) {
      case 1: m.account_id = r.ReadString(); break;
      case 2: m.device_id = r.ReadString(); break;
      case 3: m.session_nonce = r.ReadVarint(); break;
      case 4: m.video_id = r.ReadString(); break;
      case 5: {
        auto at = r.tag_offset();
        std::uint64_t action = r.ReadVarint();
        if (action != 1 && action != 2) throw DecodeError(at, "unknown feedback action");
        m.action = static_cast<FeedbackAction>(action);
        break;
      }
      case 6: {
        auto at = r.tag_offset();
        m.client_timestamp_ms = ToSigned(r.ReadVarint(), at, "client_timestamp_ms");
        break;
      }
      default: r.Skip();
    }
  }
  return m;
}

AppLogBatch DecodeAppLog(std::string_view bytes) {
  AppLogBatch m;
  ProtoReader r(bytes);
  while (r.Next()) {
    switch (r.field()) {
      case 1: m.account_id = r.ReadString(); break;
      case 2: m.device_id = r.ReadString(); break;
      case 3: m.session_nonce = r.ReadVarint(); break;
      case 4: m.events.push_back(ReadEvent(r.ReadMessage())); break;
      case 5: {
        auto at = r.tag_offset();
        m.client_timestamp_ms = ToSigned(r.ReadVarint(), at, "client_timestamp_ms");
        break;
      }
      default: r.Skip();
    }
  }
  return m;
}

VideoCard DecodeVideoCard(std::string_view bytes) { return ReadCard(ProtoReader(bytes)); }

FeedPage DecodeFeedPage(std::string_view bytes) {
  FeedPage m;
  ProtoReader r(bytes);
  while (r.Next()) {
    switch (r.field()) {
      case 1: m.videos.push_back(ReadCard(r.ReadMessage())); break;
      case 2: m.page_token = r.ReadString(); break;
      default: r.Skip();
    }
  }
  return m;
}

AccountCredentials DecodeCredentials(std::string_view bytes) {
  AccountCredentials m;
  ProtoReader r(bytes);
  while (r.Next()) {
    switch (r.field()) {
      case 1: m.account_id = r.ReadString(); break;
      case 2: m.device_id = r.ReadString(); break;
      case 3: m.key_id = r.ReadString(); break;
      case 4: m.key = r.ReadString(); break;
      default: r.Skip();
    }
  }
  return m;
}

}  // namespace fyp::wire
