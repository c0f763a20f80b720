//! CSV/JSON emitters and parsers (placeholder).
