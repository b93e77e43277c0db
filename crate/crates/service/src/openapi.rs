use serde_json::{json, Value};

fn error_response(description: &str) -> Value {
    json!({
        "description": description,
        "content": { "application/json": { "schema": { "$ref": "#/components/schemas/Error" } } }
    })
}

fn json_response(description: &str, schema: Value) -> Value {
    json!({ "description": description, "content": { "application/json": { "schema": schema } } })
}

fn id_param() -> Value {
    json!({ "name": "id", "in": "path", "required": true, "schema": { "type": "string" } })
}

/// OpenAPI 3 description of the HTTP API.
pub fn document() -> Value {
    let session = json!({ "$ref": "#/components/schemas/Session" });
    let report = json!({ "$ref": "#/components/schemas/PhaseReport" });
    json!({
        "openapi": "3.0.3",
        "info": {
            "title": "miniasm session API",
            "version": env!("CARGO_PKG_VERSION"),
            "description": "Stepwise phase execution and phase-tree branching over assembly sessions."
        },
        "paths": {
            "/sessions": {
                "post": {
                    "summary": "Create a session seeded with assembly settings",
                    "requestBody": { "required": true, "content": { "application/json": {
                        "schema": { "$ref": "#/components/schemas/CreateSession" } } } },
                    "responses": {
                        "201": json_response("Session created", session.clone()),
                        "400": error_response("MissingInput, BadK, BadParam or malformed body")
                    }
                },
                "get": {
                    "summary": "List sessions",
                    "responses": { "200": json_response("Session list", json!({ "type": "array", "items": {
                        "type": "object",
                        "properties": {
                            "id": { "type": "string" },
                            "parent": { "type": "string", "nullable": true },
                            "createdAt": { "type": "integer" },
                            "state": { "$ref": "#/components/schemas/SessionState" }
                        }
                    } })) }
                }
            },
            "/sessions/{id}": {
                "get": {
                    "summary": "Inspect a session: keys with summaries, lineage, tree links",
                    "parameters": [id_param()],
                    "responses": {
                        "200": json_response("Session", session.clone()),
                        "404": error_response("UnknownSession")
                    }
                }
            },
            "/sessions/{id}/run": {
                "post": {
                    "summary": "Run one phase",
                    "parameters": [id_param()],
                    "requestBody": { "required": true, "content": { "application/json": {
                        "schema": { "$ref": "#/components/schemas/RunRequest" } } } },
                    "responses": {
                        "200": json_response("The phase ran; status may be ok or failed", report.clone()),
                        "202": json_response("Still running; poll the session", json!({ "$ref": "#/components/schemas/Pending" })),
                        "404": error_response("UnknownSession"),
                        "409": error_response("SessionBusy"),
                        "422": error_response("UnknownPhase")
                    }
                }
            },
            "/sessions/{id}/runPipeline": {
                "post": {
                    "summary": "Run a configured pipeline; stops after the first failed phase",
                    "parameters": [id_param()],
                    "requestBody": { "required": false, "content": { "application/json": { "schema": {
                        "type": "object",
                        "properties": { "name": { "type": "string", "description": "defaults to the session's pipeline" } }
                    } } } },
                    "responses": {
                        "200": json_response("Reports in execution order", json!({ "type": "array", "items": report })),
                        "202": json_response("Still running; poll the session", json!({ "$ref": "#/components/schemas/Pending" })),
                        "404": error_response("UnknownSession"),
                        "409": error_response("SessionBusy"),
                        "422": error_response("UnknownPipeline or UnknownPhase")
                    }
                }
            },
            "/sessions/{id}/branch": {
                "post": {
                    "summary": "Branch a child session sharing the parent's current entries",
                    "parameters": [id_param()],
                    "responses": {
                        "201": json_response("Child session", session),
                        "404": error_response("UnknownSession")
                    }
                }
            },
            "/sessions/{id}/contigs": {
                "get": {
                    "summary": "Page through contigs",
                    "parameters": [
                        id_param(),
                        { "name": "sort", "in": "query", "schema": { "type": "string", "enum": ["id", "size"] },
                          "description": "size sorts descending" },
                        { "name": "limit", "in": "query", "schema": { "type": "integer", "default": 100 } },
                        { "name": "offset", "in": "query", "schema": { "type": "integer", "default": 0 } },
                        { "name": "includeSeq", "in": "query", "schema": { "type": "boolean", "default": false } }
                    ],
                    "responses": {
                        "200": json_response("Contig page", json!({ "$ref": "#/components/schemas/ContigPage" })),
                        "400": error_response("Bad query"),
                        "404": error_response("UnknownSession"),
                        "409": error_response("ContigsNotAvailable")
                    }
                }
            },
            "/sessions/{id}/contigs.fa": {
                "get": {
                    "summary": "All contigs as FASTA",
                    "parameters": [id_param()],
                    "responses": {
                        "200": { "description": "FASTA text", "content": { "text/x-fasta": { "schema": { "type": "string" } } } },
                        "404": error_response("UnknownSession"),
                        "409": error_response("ContigsNotAvailable")
                    }
                }
            },
            "/sessions/{id}/repeats": {
                "get": {
                    "summary": "Tandem repeat hits",
                    "parameters": [id_param()],
                    "responses": {
                        "200": json_response("Hits", json!({ "type": "array", "items": { "$ref": "#/components/schemas/RepeatHit" } })),
                        "404": error_response("UnknownSession"),
                        "409": error_response("RepeatsNotAvailable")
                    }
                }
            },
            "/sessions/{id}/coverage": {
                "get": {
                    "summary": "Node coverage histogram",
                    "parameters": [id_param()],
                    "responses": {
                        "200": json_response("Histogram", json!({ "$ref": "#/components/schemas/Coverage" })),
                        "404": error_response("UnknownSession"),
                        "409": error_response("CoverageNotAvailable")
                    }
                }
            },
            "/pipelines": {
                "get": {
                    "summary": "Configured pipelines",
                    "responses": { "200": json_response("Pipelines", json!({ "type": "array", "items": {
                        "type": "object",
                        "properties": {
                            "name": { "type": "string" },
                            "phases": { "type": "array", "items": { "type": "string" } }
                        }
                    } })) }
                }
            },
            "/phases": {
                "get": {
                    "summary": "Registered phases with contracts and default parameters",
                    "responses": { "200": json_response("Phases", json!({ "type": "array", "items": {
                        "type": "object",
                        "properties": {
                            "name": { "type": "string" },
                            "requires": { "type": "array", "items": { "type": "string" } },
                            "provides": { "type": "array", "items": { "type": "string" } },
                            "defaultParams": { "type": "object", "additionalProperties": { "type": "string" } }
                        }
                    } })) }
                }
            },
            "/openapi.json": {
                "get": { "summary": "This document", "responses": { "200": { "description": "OpenAPI document" } } }
            }
        },
        "components": {
            "schemas": {
                "Error": {
                    "type": "object",
                    "required": ["error", "message"],
                    "properties": { "error": { "type": "string" }, "message": { "type": "string" } }
                },
                "CreateSession": {
                    "type": "object",
                    "required": ["input"],
                    "properties": {
                        "input": { "type": "string", "description": "server-side read file path" },
                        "k": { "type": "integer", "default": 31, "description": "odd, 3..=63" },
                        "cut": { "type": "integer", "default": 0 },
                        "maxTipLen": { "type": "integer", "description": "defaults to 2k" },
                        "pipeline": { "type": "string", "default": "default" }
                    }
                },
                "RunRequest": {
                    "type": "object",
                    "required": ["phase"],
                    "properties": {
                        "phase": { "type": "string", "example": "miniasm.ScanReadsPhase" },
                        "params": { "type": "object", "additionalProperties": true }
                    }
                },
                "SessionState": {
                    "type": "object",
                    "properties": {
                        "state": { "type": "string", "enum": ["idle", "running"] },
                        "phase": { "type": "string" }
                    }
                },
                "Pending": {
                    "type": "object",
                    "properties": { "id": { "type": "string" }, "state": { "$ref": "#/components/schemas/SessionState" } }
                },
                "PhaseReport": {
                    "type": "object",
                    "properties": {
                        "phaseName": { "type": "string" },
                        "startedAt": { "type": "integer" },
                        "wallMillis": { "type": "integer" },
                        "keysAdded": { "type": "array", "items": { "type": "string" } },
                        "log": { "type": "array", "items": { "type": "string" } },
                        "status": {
                            "type": "object",
                            "properties": {
                                "state": { "type": "string", "enum": ["ok", "failed"] },
                                "reason": { "type": "string" }
                            }
                        }
                    }
                },
                "Session": {
                    "type": "object",
                    "properties": {
                        "id": { "type": "string" },
                        "parent": { "type": "string", "nullable": true },
                        "children": { "type": "array", "items": { "type": "string" } },
                        "createdAt": { "type": "integer" },
                        "state": { "$ref": "#/components/schemas/SessionState" },
                        "origin": { "type": "string", "nullable": true },
                        "keys": { "type": "array", "items": {
                            "type": "object",
                            "properties": {
                                "key": { "type": "string" },
                                "kind": { "type": "string" },
                                "summary": {}
                            }
                        } },
                        "lineage": { "type": "array", "items": { "$ref": "#/components/schemas/PhaseReport" } }
                    }
                },
                "ContigPage": {
                    "type": "object",
                    "properties": {
                        "total": { "type": "integer" },
                        "offset": { "type": "integer" },
                        "limit": { "type": "integer" },
                        "seqCapped": { "type": "boolean" },
                        "contigs": { "type": "array", "items": {
                            "type": "object",
                            "properties": {
                                "id": { "type": "integer" },
                                "size": { "type": "integer" },
                                "avgCoverage": { "type": "number" },
                                "seq": { "type": "string" }
                            }
                        } }
                    }
                },
                "RepeatHit": {
                    "type": "object",
                    "properties": {
                        "contigId": { "type": "integer" },
                        "start": { "type": "integer" },
                        "spanLength": { "type": "integer" },
                        "motif": { "type": "string" },
                        "displayPattern": { "type": "string" }
                    }
                },
                "Coverage": {
                    "type": "object",
                    "properties": {
                        "histogram": { "type": "object", "additionalProperties": { "type": "integer" } },
                        "mean": { "type": "number" },
                        "emptyGraph": { "type": "boolean" },
                        "nodes": { "type": "integer" },
                        "total": { "type": "integer" }
                    }
                }
            }
        }
    })
}
