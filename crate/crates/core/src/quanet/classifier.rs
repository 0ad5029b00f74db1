/// Labels a message: 1 for private, 0 for non-private.
pub trait Classifier {
    fn classify(&self, message: &str) -> u8;
}

impl<F: Fn(&str) -> u8> Classifier for F {
    fn classify(&self, message: &str) -> u8 {
        self(message) & 1
    }
}

/// Keyword rules: a message is private when it contains any marker.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RuleClassifier {
    markers: Vec<String>,
    case_sensitive: bool,
}

impl RuleClassifier {
    pub fn new<S: AsRef<str>>(markers: &[S], case_sensitive: bool) -> Self {
        let markers = markers
            .iter()
            .map(|m| m.as_ref())
            .filter(|m| !m.is_empty())
            .map(|m| {
                if case_sensitive {
                    m.to_owned()
                } else {
                    m.to_lowercase()
                }
            })
            .collect();
        Self {
            markers,
            case_sensitive,
        }
    }
}

impl Classifier for RuleClassifier {
    fn classify(&self, message: &str) -> u8 {
        let text = if self.case_sensitive {
            message.to_owned()
        } else {
            message.to_lowercase()
        };
        u8::from(self.markers.iter().any(|m| text.contains(m.as_str())))
    }
}
