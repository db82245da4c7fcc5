use std::process::ExitCode;

use serde::Serialize;

/// Malformed or inconsistent scenario file.
#[derive(Debug, thiserror::Error)]
#[error("invalid config: {0}")]
pub struct ConfigError(pub String);

pub const EXIT_INVALID: u8 = 2;
pub const EXIT_NUMERICAL: u8 = 3;

#[derive(Debug, Serialize)]
struct Report<'a> {
    error: Body<'a>,
}

#[derive(Debug, Serialize)]
struct Body<'a> {
    code: u8,
    kind: &'a str,
    message: String,
}

fn classify(err: &anyhow::Error) -> (u8, &'static str) {
    use welander::Error as E;
    if err.downcast_ref::<ConfigError>().is_some() {
        return (EXIT_INVALID, "invalid-config");
    }
    match err.downcast_ref::<E>() {
        Some(E::InvalidParameter(_)) => (EXIT_INVALID, "invalid-parameter"),
        Some(E::Domain(_)) => (EXIT_INVALID, "domain"),
        Some(E::NotFound(_)) => (EXIT_NUMERICAL, "not-found"),
        Some(E::NoConvergence { .. }) => (EXIT_NUMERICAL, "no-convergence"),
        Some(E::Continuation(_)) => (EXIT_NUMERICAL, "continuation"),
        Some(_) => (EXIT_NUMERICAL, "integration"),
        None => (EXIT_NUMERICAL, "io"),
    }
}

/// Print the error as one line of JSON on stderr and pick the exit code.
pub fn report(err: &anyhow::Error) -> ExitCode {
    let (code, kind) = classify(err);
    let body = Report {
        error: Body {
            code,
            kind,
            message: format!("{err:#}"),
        },
    };
    eprintln!("{}", serde_json::to_string(&body).expect("error report serialises"));
    ExitCode::from(code)
}

#[cfg(test)]
mod tests {
    use anyhow::Context;

    use super::*;

    #[test]
    fn exit_codes() {
        let num: anyhow::Error = welander::Error::NoConvergence { residual: 1.0 }.into();
        assert_eq!(classify(&num), (EXIT_NUMERICAL, "no-convergence"));
        let chat: anyhow::Error = welander::Error::Chatter { limit: 3 }.into();
        assert_eq!(classify(&chat).0, EXIT_NUMERICAL);
        let bad: anyhow::Error = welander::Error::InvalidParameter("x".into()).into();
        assert_eq!(classify(&bad).0, EXIT_INVALID);
        let wrapped = Err::<(), _>(ConfigError("y".into())).context("loading").unwrap_err();
        assert_eq!(classify(&wrapped), (EXIT_INVALID, "invalid-config"));
    }
}
