//! Serde adapter for byte payloads: UTF-8 content is written as a plain JSON
//! string, anything else as `{"hex": "..."}`.

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum Repr {
    Text(String),
    Hex { hex: String },
}

pub fn serialize<S: Serializer>(bytes: &[u8], ser: S) -> Result<S::Ok, S::Error> {
    match std::str::from_utf8(bytes) {
        Ok(text) => Repr::Text(text.to_string()).serialize(ser),
        Err(_) => Repr::Hex { hex: hex::encode(bytes) }.serialize(ser),
    }
}

pub fn deserialize<'de, D: Deserializer<'de>>(de: D) -> Result<Vec<u8>, D::Error> {
    match Repr::deserialize(de)? {
        Repr::Text(t) => Ok(t.into_bytes()),
        Repr::Hex { hex } => hex::decode(hex).map_err(D::Error::custom),
    }
}

pub mod option {
    use super::*;

    pub fn serialize<S: Serializer>(bytes: &Option<Vec<u8>>, ser: S) -> Result<S::Ok, S::Error> {
        match bytes {
            Some(b) => super::serialize(b, ser),
            None => ser.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(de: D) -> Result<Option<Vec<u8>>, D::Error> {
        match Option::<Repr>::deserialize(de)? {
            None => Ok(None),
            Some(Repr::Text(t)) => Ok(Some(t.into_bytes())),
            Some(Repr::Hex { hex }) => hex::decode(hex).map(Some).map_err(D::Error::custom),
        }
    }
}
