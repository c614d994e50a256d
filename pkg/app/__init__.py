# Lambda term counting and sampling toolkit
