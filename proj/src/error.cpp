#include "vnsum/error.hpp"

namespace vnsum {

const char* errc_name(Errc code) {
    switch (code) {
        case Errc::invalid_argument: return "InvalidArgument";
        case Errc::io: return "IoError";
        case Errc::parse: return "ParseError";
        case Errc::missing_root: return "MissingRoot";
        case Errc::empty_cluster: return "EmptyCluster";
        case Errc::no_reference: return "NoReference";
        case Errc::encoding: return "EncodingError";
        case Errc::empty_after_preprocess: return "EmptyAfterPreprocess";
        case Errc::provider_failure: return "ProviderFailure";
        case Errc::zero_vector: return "ZeroVector";
        case Errc::dim_mismatch: return "DimMismatch";
        case Errc::missing_key: return "MissingKey";
        case Errc::empty_tokens: return "EmptyTokens";
        case Errc::zero_norm: return "ZeroNorm";
        case Errc::length_mismatch: return "LengthMismatch";
        case Errc::alpha_out_of_range: return "AlphaOutOfRange";
        case Errc::k_too_large: return "KTooLarge";
        case Errc::empty_extract: return "EmptyExtract";
        case Errc::endpoint_unreachable: return "EndpointUnreachable";
        case Errc::bad_response: return "BadResponse";
        case Errc::retries_exhausted: return "RetriesExhausted";
        case Errc::empty_reference: return "EmptyReference";
        case Errc::duplicate_alpha: return "DuplicateAlpha";
    }
    return "UnknownError";
}

}  // namespace vnsum
