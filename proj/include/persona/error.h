#pragma once

#include <stdexcept>
#include <string>

namespace persona {

// Input data is malformed or violates a precondition. The CLI maps this
// family to exit code 2.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid configuration or arguments. The CLI maps this family to exit code 3.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define PERSONA_DATA_ERROR(Name)                  \
  class Name : public DataError {                 \
   public:                                        \
    using DataError::DataError;                   \
  }

#define PERSONA_CONFIG_ERROR(Name)                \
  class Name : public ConfigError {               \
   public:                                        \
    using ConfigError::ConfigError;               \
  }

// transcript
PERSONA_DATA_ERROR(SchemaError);
PERSONA_DATA_ERROR(EncodingError);
PERSONA_DATA_ERROR(LabelError);

// msf
PERSONA_DATA_ERROR(EmptySceneError);

// annotation
PERSONA_DATA_ERROR(UnknownSubSceneError);
PERSONA_DATA_ERROR(ScoreRangeError);
PERSONA_DATA_ERROR(InsufficientDataError);
PERSONA_DATA_ERROR(UnknownAnnotatorError);

// agreement
PERSONA_DATA_ERROR(LengthMismatchError);
PERSONA_DATA_ERROR(EmptyInputError);
PERSONA_DATA_ERROR(UnequalRaterCountError);
PERSONA_DATA_ERROR(DegenerateError);

// formats
PERSONA_DATA_ERROR(NoMainSpeakerUtterancesError);

// classifiers
PERSONA_DATA_ERROR(EmptyDatasetError);
PERSONA_DATA_ERROR(EmptySequenceError);
PERSONA_DATA_ERROR(IndexOutOfVocabError);
PERSONA_DATA_ERROR(SingleClassError);

// eval
PERSONA_CONFIG_ERROR(BadKError);

#undef PERSONA_DATA_ERROR
#undef PERSONA_CONFIG_ERROR

}  // namespace persona
