# Extra modules are not exported here, so that they are only imported
# when needed.
