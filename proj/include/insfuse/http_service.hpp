/*
 * Copyright 2026 The insfuse Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef INSFUSE_HTTP_SERVICE_HPP_
#define INSFUSE_HTTP_SERVICE_HPP_

#include <string>

#include "insfuse/session.hpp"

namespace httplib {
class Server;
}

namespace insfuse {

// Routes:
//   POST /sessions                      {run, topic_id, strategy:{kind, ...}}
//   POST /sessions/{id}/labels          {labels:[{shot_id, polarity}]}
//   GET  /sessions/{id}/ranking?limit=n
//   GET  /sessions/{id}/export          run-file bytes
//   GET  /sessions/{id}/log             accepted label batches
//   GET  /assets/keyframes/{shot_id}    image bytes or 404
// Errors answer {code, message} with the ServiceError status.
void mount_routes(httplib::Server& server, SessionStore& store);

// JSON body of POST /sessions parsed into its parts; throws ServiceError(400).
struct CreateRequest {
  std::string run;
  std::string topic_id;
  StrategySpec strategy;
};
CreateRequest parse_create_request(const std::string& body);

}  // namespace insfuse

#endif  // INSFUSE_HTTP_SERVICE_HPP_
