// Copyright 2026 The Bubble Audit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "bubble_audit/annotation_server.h"

#include <thread>

#include "httplib.h"
#include "record_io.h"

namespace bubble_audit {

using internal::Json;

namespace {

int HttpStatus(const absl::Status& status) {
  switch (status.code()) {
    case absl::StatusCode::kInvalidArgument:
    case absl::StatusCode::kOutOfRange:
      return 400;
    case absl::StatusCode::kNotFound:
      return 404;
    case absl::StatusCode::kFailedPrecondition:
    case absl::StatusCode::kAlreadyExists:
      return 409;
    default:
      return 500;
  }
}

void Reply(httplib::Response& res, int status, const Json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void ReplyError(httplib::Response& res, const absl::Status& status) {
  Reply(res, HttpStatus(status), Json{{"error", std::string(status.message())}});
}

Json ContextsToJson(const std::vector<ListContext>& contexts) {
  Json out = Json::array();
  for (const ListContext& c : contexts) {
    out.push_back(Json{{"list_kind", std::string(ListKindName(c.kind))},
                       {"source", c.source},
                       {"rank", c.rank}});
  }
  return out;
}

Json RecordToJson(const AnnotationRecord& r) {
  return Json::parse(AnnotationToLine(r));
}

Json KappaToJson(const std::optional<KappaResult>& k) {
  if (!k) return nullptr;
  return Json{{"kappa", k->kappa},
              {"observed", k->observed},
              {"expected", k->expected},
              {"pairs", k->pairs},
              {"degenerate", k->degenerate}};
}

// Parses a JSON object body; nullopt after replying 400.
std::optional<Json> ParseBody(const httplib::Request& req,
                              httplib::Response& res) {
  Json body = Json::parse(req.body, nullptr, /*allow_exceptions=*/false);
  if (body.is_discarded() || !body.is_object()) {
    ReplyError(res, absl::InvalidArgumentError("body must be a JSON object"));
    return std::nullopt;
  }
  return body;
}

// Reads an optional typed field; false after replying 400.
template <typename T>
bool ReadField(const Json& body, const char* key, T& out,
               httplib::Response& res, bool required) {
  auto it = body.find(key);
  if (it == body.end() || it->is_null()) {
    if (!required) return true;
    ReplyError(res, absl::InvalidArgumentError(std::string("missing field '") +
                                               key + "'"));
    return false;
  }
  try {
    out = it->get<T>();
  } catch (const Json::exception&) {
    ReplyError(res, absl::InvalidArgumentError(std::string("field '") + key +
                                               "' has the wrong type"));
    return false;
  }
  return true;
}

std::string AnnotatorField(const Json& body, const char* primary,
                           const char* alias) {
  if (auto it = body.find(primary); it != body.end() && it->is_string()) {
    return it->get<std::string>();
  }
  if (auto it = body.find(alias); it != body.end() && it->is_string()) {
    return it->get<std::string>();
  }
  return "";
}

}  // namespace

struct AnnotationServer::Impl {
  explicit Impl(AnnotationService& s) : service(s) {}

  void Routes() {
    server.Get("/api/queue/next", [this](const httplib::Request& req,
                                         httplib::Response& res) {
      const std::string annotator = req.get_param_value("annotator");
      absl::StatusOr<std::optional<QueueItem>> item =
          service.NextItem(annotator);
      if (!item.ok()) return ReplyError(res, item.status());
      if (!item->has_value()) {
        return Reply(res, 200, Json{{"empty", true}, {"item", nullptr}});
      }
      const QueueItem& q = **item;
      Reply(res, 200,
            Json{{"empty", false},
                 {"item", Json{{"video_id", q.video_id},
                               {"title", q.title},
                               {"channel_id", q.channel_id},
                               {"appearance_count", q.appearance_count},
                               {"contexts", ContextsToJson(q.contexts)},
                               {"prior_annotations", q.prior_annotations}}}});
    });

    server.Post("/api/annotations", [this](const httplib::Request& req,
                                           httplib::Response& res) {
      std::optional<Json> body = ParseBody(req, res);
      if (!body) return;
      Submission s;
      s.annotator_id = AnnotatorField(*body, "annotator_id", "annotator");
      if (!ReadField(*body, "video_id", s.video_id, res, true) ||
          !ReadField(*body, "code", s.code, res, true) ||
          !ReadField(*body, "hesitation", s.hesitation, res, false) ||
          !ReadField(*body, "comment", s.comment, res, false)) {
        return;
      }
      absl::StatusOr<AnnotationRecord> record = service.Submit(s);
      if (!record.ok()) return ReplyError(res, record.status());
      Reply(res, 200, Json{{"record", RecordToJson(*record)}});
    });

    server.Get("/api/backcheck/pending",
               [this](const httplib::Request&, httplib::Response& res) {
                 Json items = Json::array();
                 for (const AnnotationRecord& r : service.PendingBackchecks()) {
                   items.push_back(RecordToJson(r));
                 }
                 Reply(res, 200, Json{{"items", std::move(items)}});
               });

    server.Post("/api/backcheck/resolve", [this](const httplib::Request& req,
                                                 httplib::Response& res) {
      std::optional<Json> body = ParseBody(req, res);
      if (!body) return;
      std::string video_id;
      int code = 0;
      if (!ReadField(*body, "video_id", video_id, res, true) ||
          !ReadField(*body, "resolved_code", code, res, true)) {
        return;
      }
      const std::string resolver =
          AnnotatorField(*body, "resolver_id", "resolver");
      absl::StatusOr<AnnotationRecord> record =
          service.ResolveBackcheck(video_id, code, resolver);
      if (!record.ok()) return ReplyError(res, record.status());
      Reply(res, 200, Json{{"record", RecordToJson(*record)}});
    });

    server.Get("/api/agreement",
               [this](const httplib::Request&, httplib::Response& res) {
                 const AgreementReport a = service.Agreement();
                 Reply(res, 200,
                       Json{{"paired_videos", a.paired_videos},
                            {"excluded_pairs", a.excluded_pairs},
                            {"stance", KappaToJson(a.stance)},
                            {"raw", KappaToJson(a.raw)}});
               });

    server.Get(R"(/api/videos/([^/]+))", [this](const httplib::Request& req,
                                                httplib::Response& res) {
      absl::StatusOr<VideoDetail> v = service.Video(req.matches[1].str());
      if (!v.ok()) return ReplyError(res, v.status());
      Json annotations = Json::array();
      for (const AnnotationRecord& r : v->annotations) {
        annotations.push_back(RecordToJson(r));
      }
      Json queue = nullptr;
      if (v->queue_entry) {
        queue = Json{{"appearance_count", v->queue_entry->appearance_count},
                     {"contexts", ContextsToJson(v->queue_entry->contexts)}};
      }
      Reply(res, 200,
            Json{{"video_id", v->video_id},
                 {"title", v->meta.title},
                 {"channel_id", v->meta.channel_id},
                 {"queue", std::move(queue)},
                 {"annotations", std::move(annotations)}});
    });
  }

  AnnotationService& service;
  httplib::Server server;
  std::thread thread;
  int port = 0;
};

AnnotationServer::AnnotationServer(AnnotationService& service)
    : impl_(std::make_unique<Impl>(service)) {
  impl_->Routes();
}

AnnotationServer::~AnnotationServer() { Stop(); }

absl::Status AnnotationServer::Start(const std::string& host, int port) {
  if (port == 0) {
    impl_->port = impl_->server.bind_to_any_port(host);
    if (impl_->port < 0) {
      return absl::UnavailableError("cannot bind " + host);
    }
  } else {
    if (!impl_->server.bind_to_port(host, port)) {
      return absl::UnavailableError("cannot bind " + host + ":" +
                                    std::to_string(port));
    }
    impl_->port = port;
  }
  impl_->thread = std::thread([this] { impl_->server.listen_after_bind(); });
  impl_->server.wait_until_ready();
  return absl::OkStatus();
}

absl::Status AnnotationServer::Run(const std::string& host, int port) {
  impl_->port = port;
  if (!impl_->server.listen(host, port)) {
    return absl::UnavailableError("cannot listen on " + host + ":" +
                                  std::to_string(port));
  }
  return absl::OkStatus();
}

void AnnotationServer::Stop() {
  impl_->server.stop();
  if (impl_->thread.joinable()) impl_->thread.join();
}

int AnnotationServer::port() const { return impl_->port; }

}  // namespace bubble_audit
