#![no_main]

use libfuzzer_sys::fuzz_target;
use steering::scenarios::SweepConfig;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(config) = SweepConfig::from_json(text) {
        // anything accepted must survive a round trip
        let again = serde_json::to_string(&config).unwrap();
        assert_eq!(SweepConfig::from_json(&again).unwrap(), config);
    }
});
