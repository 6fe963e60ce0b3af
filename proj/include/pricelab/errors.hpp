// Copyright 2026 The pricelab Authors
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

#pragma once

#include <stdexcept>
#include <string>

namespace pricelab {

// Root of every error the library raises on purpose.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Input violates a documented precondition (bad parameters, malformed specs).
class ContractViolation : public Error {
 public:
  using Error::Error;
};

// Target collusive price outside (p*, p^M].
class OutOfRangeTarget : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class TemplateOverflow : public Error {
 public:
  using Error::Error;
};

class MalformedResponse : public Error {
 public:
  using Error::Error;
};

class NonPositivePrice : public MalformedResponse {
 public:
  using MalformedResponse::MalformedResponse;
};

class TransportError : public Error {
 public:
  using Error::Error;
};

class Timeout : public TransportError {
 public:
  using TransportError::TransportError;
};

// An agent could not produce a price; the engine aborts the run.
class AgentFailure : public Error {
 public:
  using Error::Error;
};

// A run stopped early because an agent failed; partial logs are on disk.
class RunAborted : public AgentFailure {
 public:
  using AgentFailure::AgentFailure;
};

class ScriptExhausted : public Error {
 public:
  using Error::Error;
};

class InsufficientSample : public Error {
 public:
  using Error::Error;
};

class FormatError : public Error {
 public:
  using Error::Error;
};

}  // namespace pricelab
