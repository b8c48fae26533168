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

// JSON-over-HTTP front end of AnnotationService.
//
//   GET  /api/queue/next?annotator=ID
//   POST /api/annotations         {annotator_id, video_id, code, hesitation, comment}
//   GET  /api/backcheck/pending
//   POST /api/backcheck/resolve   {video_id, resolved_code, resolver_id}
//   GET  /api/agreement
//   GET  /api/videos/{id}
//
// Errors carry {"error": message} with 400, 404 or 409.

#ifndef BUBBLE_AUDIT_ANNOTATION_SERVER_H_
#define BUBBLE_AUDIT_ANNOTATION_SERVER_H_

#include <memory>
#include <string>

#include "absl/status/status.h"
#include "bubble_audit/annotation_service.h"

namespace bubble_audit {

class AnnotationServer {
 public:
  explicit AnnotationServer(AnnotationService& service);
  ~AnnotationServer();

  AnnotationServer(const AnnotationServer&) = delete;
  AnnotationServer& operator=(const AnnotationServer&) = delete;

  // Binds and serves on a background thread. Port 0 picks a free port.
  absl::Status Start(const std::string& host, int port);
  // Serves on the calling thread until Stop() is called elsewhere.
  absl::Status Run(const std::string& host, int port);
  void Stop();

  int port() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace bubble_audit

#endif  // BUBBLE_AUDIT_ANNOTATION_SERVER_H_
