//! Costs in files are decimal numbers, or the string "inf".

use serde::de::{self, Visitor};
use serde::{Deserializer, Serializer};

use headmt_core::Cost;

pub fn serialize<S: Serializer>(c: &Cost, s: S) -> Result<S::Ok, S::Error> {
    if c.is_infinite() {
        s.serialize_str("inf")
    } else {
        s.serialize_f64(c.value())
    }
}

pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Cost, D::Error> {
    struct V;
    impl Visitor<'_> for V {
        type Value = Cost;

        fn expecting(&self, f: &mut std::fmt::Formatter) -> std::fmt::Result {
            f.write_str("a cost: a number or \"inf\"")
        }

        fn visit_f64<E: de::Error>(self, v: f64) -> Result<Cost, E> {
            if v.is_nan() || v == f64::NEG_INFINITY {
                return Err(E::custom("cost must be a number or \"inf\""));
            }
            Ok(Cost::new(v))
        }

        fn visit_i64<E: de::Error>(self, v: i64) -> Result<Cost, E> {
            Ok(Cost::new(v as f64))
        }

        fn visit_u64<E: de::Error>(self, v: u64) -> Result<Cost, E> {
            Ok(Cost::new(v as f64))
        }

        fn visit_str<E: de::Error>(self, v: &str) -> Result<Cost, E> {
            match v {
                "inf" => Ok(Cost::INFINITE),
                _ => Err(E::invalid_value(de::Unexpected::Str(v), &self)),
            }
        }
    }
    d.deserialize_any(V)
}
